#pragma once

#include "ethdr/blocks.hpp"
#include "ethdr/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ethdr {

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Each check returns an empty string on success or a failure description.
// They are deterministic: the same binary prints the same transcript.
std::string check_conv_fuzz(std::size_t cases, bool inject_conv_fault);
std::string check_msa_count_sweep();
std::string check_iaaf_algebra(std::size_t cases);
std::string check_dyt_contract(std::size_t samples);
std::string check_ycbcr_roundtrip(std::size_t pixels);
std::string check_weight_roundtrip();

std::vector<SuiteResult> run_selftest(bool inject_conv_fault);

// Naive attention replica that counts every scalar multiply-add performed in
// the qkv/out projections and the two attention matmuls. Verification side of
// the MSA cost model; independent of msa_forward's implementation.
struct ShadowMsaResult {
    Tensor output;
    std::uint64_t mul_adds = 0;
};
ShadowMsaResult shadow_msa(const Tensor& tokens, const AttentionParams& p);

}  // namespace ethdr
