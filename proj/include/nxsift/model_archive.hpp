#pragma once

#include <stdexcept>
#include <string>

#include "nxsift/features.hpp"
#include "nxsift/forest.hpp"

namespace nxsift {

// Raised when an archive's version or feature-order hash does not
// match this build; callers map it to the model-mismatch exit code.
struct ModelMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelArchive {
    BenignGramSet grams;
    MarkovGibberishModel markov;
    TreeEnsemble forest;
};

inline constexpr int kArchiveVersion = 1;

// Single versioned JSON archive holding the gram sets, the Markov
// matrix and the forest. Serialization is byte-deterministic for a
// given model.
void save_model(const ModelArchive& model, const std::string& path);
ModelArchive load_model(const std::string& path);

uint64_t file_fnv1a(const std::string& path);  // content hash for manifests

}  // namespace nxsift
