#pragma once

#include "bddmp/ilp.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace bddmp {

/// Desk-scale instance families. All potentials are integers drawn
/// uniformly from [-5, 5]; equal (params, seed) give equal instances.

struct RandomIlpParams {
    std::size_t vars = 10;
    std::size_t constraints = 5;
    double density = 0.5; // probability that a variable appears in a row
    /// Right-hand sides are derived from a hidden random assignment, which
    /// therefore satisfies every row.
    bool planted = true;
};
IlpInstance generate_random_ilp(const RandomIlpParams& params, std::uint64_t seed);

/// Pairwise model on a rows x cols grid with 4-neighbourhood edges; a chain
/// is a grid with one row.
struct MrfParams {
    std::size_t rows = 1;
    std::size_t cols = 3;
    std::size_t labels = 2;
};

struct MrfModel {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t labels = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges; // node pairs, first < second
    std::vector<std::vector<double>> unary;                  // [node][label]
    std::vector<std::vector<double>> pairwise;               // [edge][label_i * labels + label_j]

    std::size_t num_nodes() const { return rows * cols; }
    double energy(std::span<const std::size_t> labeling) const;
};

MrfModel generate_mrf_model(const MrfParams& params, std::uint64_t seed);
/// Local-polytope formulation: node and edge simplex rows plus the two
/// marginalization families, with integral mu variables.
IlpInstance mrf_to_ilp(const MrfModel& model);
IlpInstance generate_mrf(const MrfParams& params, std::uint64_t seed);
/// Labeling encoded by an integral local-polytope point, or nullopt if the
/// node indicators are not one-hot.
std::optional<std::vector<std::size_t>> decode_labeling(const MrfModel& model, std::span<const std::uint8_t> x);

struct GraphMatchingParams {
    std::size_t left = 2;
    std::size_t right = 2;
    /// Fraction of the quadratic terms nu_{l l' r r'} (l != l', r != r') kept.
    double pair_density = 1.0;
};
IlpInstance generate_graph_matching(const GraphMatchingParams& params, std::uint64_t seed);

/// Grid MRF over labels {0, ..., labels-1} with one projection row per grid
/// row and column. Projection values come from a hidden labeling.
struct TomographyParams {
    std::size_t rows = 2;
    std::size_t cols = 2;
    std::size_t labels = 2;
};
IlpInstance generate_tomography(const TomographyParams& params, std::uint64_t seed);

/// Detections in consecutive frames linked by transitions and divisions.
/// Flow rows exist only where a cell has somewhere to come from or go to:
/// no incoming row in the first frame, no outgoing row in the last.
struct CellTrackingParams {
    std::size_t frames = 3;
    std::size_t cells = 2; // detection hypotheses per frame
    double transition_density = 1.0;
    double division_density = 0.5;
    std::size_t conflicts = 1; // conflict pairs per frame
};
IlpInstance generate_cell_tracking(const CellTrackingParams& params, std::uint64_t seed);

enum class GeneratorKind { random_ilp, mrf, graph_matching, tomography, cell_tracking };
std::string_view to_string(GeneratorKind kind);
std::optional<GeneratorKind> parse_generator_kind(std::string_view name);

} // namespace bddmp
