#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace curvegnn {

enum class Provenance { Exact, Sampled, Learned };

std::string to_string(Provenance p);

/// Per-vertex curvature values. Unbounded-below vertices hold −∞.
struct CurvatureEstimate {
    std::vector<double> kappa;
    Provenance provenance = Provenance::Exact;
    std::size_t samples = 0;  // sampled provenance only

    std::size_t size() const noexcept { return kappa.size(); }
    bool flagged(std::size_t x) const { return std::isinf(kappa[x]) && kappa[x] < 0; }
};

}  // namespace curvegnn
