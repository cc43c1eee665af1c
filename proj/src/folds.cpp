#include "folds.hpp"

#include <algorithm>
#include <random>

#include "error.hpp"

namespace dcacrn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Fisher-Yates with an explicit modulo draw; std::shuffle's draw pattern is
// implementation-defined and this must replay identically everywhere.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream));
}

SplitPlan make_subject_folds(const std::vector<std::string>& scan_subjects, std::size_t k,
                             std::uint64_t seed) {
    if (k < 2) throw ConfigError("fold count must be >= 2");

    std::vector<std::string> subjects = scan_subjects;
    std::sort(subjects.begin(), subjects.end());
    subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
    if (subjects.size() < k) {
        throw ConfigError("need at least " + std::to_string(k) + " subjects for " + std::to_string(k) +
                          "-fold cross-validation, got " + std::to_string(subjects.size()));
    }

    std::mt19937_64 rng(derive_seed(seed, 0x5f01d5));
    deterministic_shuffle(subjects, rng);

    SplitPlan plan;
    plan.fold_count = k;
    for (std::size_t i = 0; i < subjects.size(); ++i) plan.fold_of_subject[subjects[i]] = i % k;

    plan.folds.resize(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::string> train_subjects;
        for (const auto& s : subjects)
            if (plan.fold_of_subject[s] != f) train_subjects.push_back(s);

        std::mt19937_64 vrng(derive_seed(seed, 0x7a1 + f));
        deterministic_shuffle(train_subjects, vrng);
        const std::size_t val_count = std::max<std::size_t>(1, train_subjects.size() / 5);

        std::map<std::string, char> role; // 't' train, 'v' val
        for (std::size_t i = 0; i < train_subjects.size(); ++i)
            role[train_subjects[i]] = i < val_count ? 'v' : 't';

        for (std::size_t s = 0; s < scan_subjects.size(); ++s) {
            const std::size_t fold = plan.fold_of_subject.at(scan_subjects[s]);
            if (fold == f) {
                plan.folds[f].test.push_back(s);
            } else if (role.at(scan_subjects[s]) == 'v') {
                plan.folds[f].val.push_back(s);
            } else {
                plan.folds[f].train.push_back(s);
            }
        }
    }
    return plan;
}

} // namespace dcacrn
