#ifndef DCACRN_FOLDS_HPP
#define DCACRN_FOLDS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dcacrn {

/// Scan indices for one cross-validation round. Validation is carved out
/// of the training subjects, never the test fold.
struct FoldPlan {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

struct SplitPlan {
    std::size_t fold_count = 0;
    std::map<std::string, std::size_t> fold_of_subject;
    std::vector<FoldPlan> folds;
};

/// Subject-level k-fold assignment: every scan of a subject lands in the
/// same fold; fold sizes differ by at most one subject. Validation takes
/// one fifth of the training subjects (at least one) per fold. Fully
/// deterministic in (scan_subjects, k, seed).
SplitPlan make_subject_folds(const std::vector<std::string>& scan_subjects, std::size_t k,
                             std::uint64_t seed);

/// Deterministic seed derivation for per-fold RNG streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

} // namespace dcacrn

#endif // DCACRN_FOLDS_HPP
