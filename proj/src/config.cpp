#include "ethdr/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ethdr {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t v = 0;
    if (value.empty()) throw ConfigError("config: empty value for " + key);
    for (char ch : value) {
        if (ch < '0' || ch > '9') throw ConfigError("config: bad number '" + value + "' for " + key);
        v = v * 10 + static_cast<std::size_t>(ch - '0');
    }
    return v;
}

}  // namespace

ModelConfig parse_config_text(const std::string& text) {
    ModelConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError("config: repeated key '" + key + "'");

        if (key == "variant") {
            if (value == "main") cfg.variant = Variant::Main;
            else if (value == "lite") cfg.variant = Variant::Lite;
            else throw ConfigError("config: variant must be main or lite, got '" + value + "'");
        } else if (key == "base_channels") {
            cfg.base_channels = parse_count(key, value);
        } else if (key == "embed_dim") {
            cfg.embed_dim = parse_count(key, value);
        } else if (key == "num_blocks") {
            cfg.num_blocks = parse_count(key, value);
        } else if (key == "heads") {
            cfg.heads = parse_count(key, value);
        } else if (key == "ire_stride") {
            cfg.ire_stride = parse_count(key, value);
        } else if (key == "mlp_ratio") {
            cfg.mlp_ratio = parse_count(key, value);
        } else if (key == "emsdc_activation") {
            if (value == "gelu") cfg.emsdc_activation = EmsdcAct::Gelu;
            else if (value == "rprelu") cfg.emsdc_activation = EmsdcAct::RPRelu;
            else throw ConfigError("config: emsdc_activation must be gelu or rprelu");
        } else if (key == "color_mode") {
            if (value == "paper") cfg.color_mode = ColorMode::Paper;
            else if (value == "bt601") cfg.color_mode = ColorMode::Bt601;
            else throw ConfigError("config: color_mode must be paper or bt601");
        } else if (key == "emsdc_attach") {
            if (value == "input") cfg.emsdc_attach = EmsdcAttach::Input;
            else if (value == "output") cfg.emsdc_attach = EmsdcAttach::Output;
            else throw ConfigError("config: emsdc_attach must be input or output");
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    try {
        validate_config(cfg);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ModelConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_text(const ModelConfig& cfg) {
    std::ostringstream os;
    os << "variant=" << (cfg.variant == Variant::Main ? "main" : "lite") << "\n";
    os << "base_channels=" << cfg.base_channels << "\n";
    os << "embed_dim=" << cfg.embed_dim << "\n";
    os << "num_blocks=" << cfg.num_blocks << "\n";
    os << "heads=" << cfg.heads << "\n";
    os << "ire_stride=" << cfg.ire_stride << "\n";
    os << "mlp_ratio=" << cfg.mlp_ratio << "\n";
    os << "emsdc_activation=" << (cfg.emsdc_activation == EmsdcAct::Gelu ? "gelu" : "rprelu") << "\n";
    os << "color_mode=" << (cfg.color_mode == ColorMode::Paper ? "paper" : "bt601") << "\n";
    os << "emsdc_attach=" << (cfg.emsdc_attach == EmsdcAttach::Input ? "input" : "output") << "\n";
    return os.str();
}

}  // namespace ethdr
