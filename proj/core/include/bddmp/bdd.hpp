#pragma once

#include "bddmp/ilp.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bddmp {

using NodeId = std::uint32_t;

enum class FixResult { feasible, infeasible };

struct BddBuildOptions {
    /// Cap on distinct partial-sum states at any level of the construction.
    std::size_t max_states_per_level = std::size_t{1} << 22;
};

class BddBuildError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reduced ordered BDD of one subproblem.
///
/// Levels follow the support order and every root-to-terminal path visits
/// consecutive levels: a node may have both arcs pointing to the same child.
/// Internal nodes are numbered level by level starting at 2; ids 0 and 1 are
/// the terminals. Fixations only redirect arcs to the false terminal and
/// deactivate nodes; every mutation goes to a journal so that rollback()
/// restores the exact earlier state.
class Bdd {
public:
    static constexpr NodeId top = 0;
    static constexpr NodeId bot = 1;

    struct Checkpoint {
        std::uint64_t id = 0;
    };

    struct NodeRange {
        NodeId first;
        NodeId last; // one past the end
    };

    /// Node arcs of a leveled graph before reduction. Child references are
    /// top, bot, or first_internal + index into the next level.
    struct LevelNode {
        NodeId lo;
        NodeId hi;
    };
    static constexpr NodeId first_internal = 2;

    /// The always-true diagram over an empty support.
    Bdd() = default;

    /// Sentinel for an empty feasible set.
    static Bdd infeasible(std::vector<std::size_t> support);

    /// Reduces a leveled graph; levels[l] holds the nodes with index support[l]
    /// and the root is levels[0][0]. Nodes are renumbered in order of first use.
    static Bdd from_levels(std::vector<std::size_t> support, const std::vector<std::vector<LevelNode>>& levels);

    /// Diagram whose true-paths are exactly the given assignments over support.
    static Bdd from_solutions(std::vector<std::size_t> support,
                              std::span<const std::vector<std::uint8_t>> solutions);

    std::span<const std::size_t> support() const { return support_; }
    std::size_t num_levels() const { return support_.size(); }
    std::size_t var_at(std::size_t level) const { return support_[level]; }
    /// Level of a variable; throws std::out_of_range if it is not in the support.
    std::size_t level_of_var(std::size_t var) const;
    bool contains_var(std::size_t var) const;

    /// True iff no assignment reaches the true terminal.
    bool empty() const { return sentinel_ || (!support_.empty() && !alive_[first_internal]); }
    NodeId root() const { return support_.empty() ? top : first_internal; }

    /// Live internal nodes.
    std::size_t num_nodes() const;
    /// All node slots including terminals and deactivated nodes.
    std::size_t node_capacity() const { return lo_.size(); }
    std::size_t live_nodes_at(std::size_t level) const { return live_per_level_[level]; }
    NodeRange nodes_at(std::size_t level) const { return {level_begin_[level], level_begin_[level + 1]}; }

    bool alive(NodeId v) const { return alive_[v] != 0; }
    NodeId lo(NodeId v) const { return lo_[v]; }
    NodeId hi(NodeId v) const { return hi_[v]; }
    NodeId child(NodeId v, std::uint8_t bit) const { return bit ? hi_[v] : lo_[v]; }
    std::size_t level_of(NodeId v) const { return level_[v]; }
    std::size_t in_degree(NodeId v) const { return indeg_[v]; }

    Checkpoint checkpoint();
    /// Undoes every mutation after the checkpoint; it and all later
    /// checkpoints are consumed. Throws std::invalid_argument on an unknown one.
    void rollback(Checkpoint cp);
    std::size_t open_checkpoints() const { return checkpoints_.size(); }
    std::size_t journal_size() const { return journal_.size(); }

    /// Restricts the diagram to var = value. Requires an open checkpoint.
    FixResult fix_variable(std::size_t var, std::uint8_t value);
    FixResult fix_level(std::size_t level, std::uint8_t value);

    /// Literals shared by every true-path, in level order. Requires !empty().
    std::vector<std::pair<std::size_t, std::uint8_t>> forced_literals() const;

    /// Checks the structural invariants of the diagram; returns a description
    /// of the first violation or an empty string.
    std::string check_invariants(bool require_reduced) const;

    /// Graph-state equality (journal and checkpoints are not compared).
    friend bool operator==(const Bdd& a, const Bdd& b);

private:
    enum class JournalKind : std::uint8_t { redirect, deactivate };

    struct JournalEntry {
        JournalKind kind;
        std::uint8_t bit;
        NodeId node;
        NodeId previous;
    };

    void redirect_to_bot(NodeId v, std::uint8_t bit);
    void deactivate(NodeId v);
    void remove_forward(NodeId v);
    void remove_backward(NodeId v);
    void undo(const JournalEntry& e);

    std::vector<std::size_t> support_;
    std::vector<std::pair<std::size_t, std::size_t>> var_levels_; // sorted (var, level)
    std::vector<NodeId> level_begin_{first_internal};
    std::vector<NodeId> lo_{top, bot};
    std::vector<NodeId> hi_{top, bot};
    std::vector<std::uint32_t> level_{0, 0};
    std::vector<std::uint8_t> alive_{1, 1};
    std::vector<std::uint32_t> indeg_{0, 0};
    std::vector<std::uint32_t> live_per_level_;
    std::vector<NodeId> parent_begin_{0, 0, 0};
    std::vector<NodeId> parents_; // (parent << 1) | arc bit
    bool sentinel_ = false;

    std::vector<JournalEntry> journal_;
    std::vector<std::pair<std::uint64_t, std::size_t>> checkpoints_;
    std::uint64_t next_checkpoint_ = 1;
};

/// Compiles a linear constraint over its support, ordered by ascending
/// position[var]. Throws BddBuildError when the state budget is exceeded.
Bdd build_bdd(const LinearConstraint& constraint, std::span<const std::size_t> position,
              const BddBuildOptions& options = {});
/// Same, with the support ordered by variable index.
Bdd build_bdd(const LinearConstraint& constraint, const BddBuildOptions& options = {});

/// All true-path assignments over the support, in lexicographic order.
/// Throws std::length_error if the support is larger than cap.
std::vector<std::vector<std::uint8_t>> enumerate_solutions(const Bdd& bdd, std::size_t cap = 25);

/// Graphviz rendering; solid 1-arcs, dotted 0-arcs, live nodes only.
std::string to_dot(const Bdd& bdd, std::span<const std::string> var_names);

} // namespace bddmp
