#include "bddmp/generators.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace bddmp {

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::int64_t integer(std::int64_t lo, std::int64_t hi)
    {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
    }
    double potential() { return static_cast<double>(integer(-5, 5)); }
    bool chance(double p) { return p >= 1.0 || std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p; }

private:
    std::mt19937_64 engine_;
};

void require(bool ok, const char* message)
{
    if (!ok)
        throw std::invalid_argument(message);
}

std::string name(std::string_view prefix, std::initializer_list<std::size_t> indices)
{
    std::string out(prefix);
    for (std::size_t i : indices) {
        out += '_';
        out += std::to_string(i);
    }
    return out;
}

LinearConstraint row(std::string row_name, std::vector<Term> terms, Relation rel, std::int64_t rhs)
{
    return LinearConstraint{std::move(row_name), std::move(terms), rel, rhs};
}

} // namespace

IlpInstance generate_random_ilp(const RandomIlpParams& params, std::uint64_t seed)
{
    require(params.vars > 0, "random_ilp needs at least one variable");
    require(params.density > 0.0 && params.density <= 1.0, "density must lie in (0, 1]");
    Rng rng(seed);
    IlpInstance instance;
    for (std::size_t i = 0; i < params.vars; ++i)
        instance.add_variable(name("x", {i}), rng.potential());

    std::vector<std::uint8_t> hidden(params.vars);
    for (auto& v : hidden)
        v = static_cast<std::uint8_t>(rng.integer(0, 1));

    for (std::size_t j = 0; j < params.constraints; ++j) {
        std::vector<Term> terms;
        for (std::size_t i = 0; i < params.vars; ++i) {
            if (!rng.chance(params.density))
                continue;
            std::int64_t a = rng.integer(-3, 2);
            if (a >= 0)
                ++a; // nonzero, uniform over [-3, 3] \ {0}
            terms.push_back({i, a});
        }
        if (terms.empty()) {
            const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(params.vars) - 1));
            terms.push_back({i, rng.integer(0, 1) ? 1 : -1});
        }
        const auto rel = static_cast<Relation>(rng.integer(0, 2));
        std::int64_t rhs = 0;
        if (params.planted) {
            std::int64_t activity = 0;
            for (const Term& t : terms)
                activity += hidden[t.var] ? t.coeff : 0;
            const std::int64_t slack = rng.integer(0, 2);
            rhs = rel == Relation::less_equal ? activity + slack
                  : rel == Relation::greater_equal ? activity - slack
                                                   : activity;
        } else {
            rhs = rng.integer(-3, 3);
        }
        instance.add_constraint(row(name("c", {j}), std::move(terms), rel, rhs));
    }
    return instance;
}

double MrfModel::energy(std::span<const std::size_t> labeling) const
{
    double e = 0.0;
    for (std::size_t v = 0; v < num_nodes(); ++v)
        e += unary[v][labeling[v]];
    for (std::size_t k = 0; k < edges.size(); ++k)
        e += pairwise[k][labeling[edges[k].first] * labels + labeling[edges[k].second]];
    return e;
}

MrfModel generate_mrf_model(const MrfParams& params, std::uint64_t seed)
{
    require(params.rows > 0 && params.cols > 0, "grid dimensions must be positive");
    require(params.labels >= 2, "an MRF needs at least two labels");
    Rng rng(seed);
    MrfModel model;
    model.rows = params.rows;
    model.cols = params.cols;
    model.labels = params.labels;
    for (std::size_t r = 0; r < params.rows; ++r)
        for (std::size_t c = 0; c < params.cols; ++c) {
            const std::size_t v = r * params.cols + c;
            if (c + 1 < params.cols)
                model.edges.emplace_back(v, v + 1);
            if (r + 1 < params.rows)
                model.edges.emplace_back(v, v + params.cols);
        }
    model.unary.assign(model.num_nodes(), std::vector<double>(params.labels));
    for (auto& u : model.unary)
        for (double& t : u)
            t = rng.potential();
    model.pairwise.assign(model.edges.size(), std::vector<double>(params.labels * params.labels));
    for (auto& p : model.pairwise)
        for (double& t : p)
            t = rng.potential();
    return model;
}

namespace {

// Appends the local-polytope variables and rows of a model; returns the
// index of the first node indicator. Node v, label x sits at base + v*L + x.
std::size_t add_local_polytope(IlpInstance& instance, const MrfModel& model)
{
    const std::size_t L = model.labels;
    const std::size_t base = instance.num_vars();
    for (std::size_t v = 0; v < model.num_nodes(); ++v)
        for (std::size_t x = 0; x < L; ++x)
            instance.add_variable(name("mu", {v, x}), model.unary[v][x]);
    const std::size_t edge_base = instance.num_vars();
    for (std::size_t k = 0; k < model.edges.size(); ++k) {
        const auto [a, b] = model.edges[k];
        for (std::size_t x = 0; x < L; ++x)
            for (std::size_t y = 0; y < L; ++y)
                instance.add_variable(name("mu", {a, b, x, y}), model.pairwise[k][x * L + y]);
    }
    auto node_var = [&](std::size_t v, std::size_t x) { return base + v * L + x; };
    auto edge_var = [&](std::size_t k, std::size_t x, std::size_t y) { return edge_base + k * L * L + x * L + y; };

    for (std::size_t v = 0; v < model.num_nodes(); ++v) {
        std::vector<Term> terms;
        for (std::size_t x = 0; x < L; ++x)
            terms.push_back({node_var(v, x), 1});
        instance.add_constraint(row(name("node", {v}), std::move(terms), Relation::equal, 1));
    }
    for (std::size_t k = 0; k < model.edges.size(); ++k) {
        std::vector<Term> terms;
        for (std::size_t x = 0; x < L; ++x)
            for (std::size_t y = 0; y < L; ++y)
                terms.push_back({edge_var(k, x, y), 1});
        instance.add_constraint(row(name("edge", {k}), std::move(terms), Relation::equal, 1));
    }
    for (std::size_t k = 0; k < model.edges.size(); ++k) {
        const auto [a, b] = model.edges[k];
        for (std::size_t x = 0; x < L; ++x) {
            std::vector<Term> terms;
            for (std::size_t y = 0; y < L; ++y)
                terms.push_back({edge_var(k, x, y), 1});
            terms.push_back({node_var(a, x), -1});
            instance.add_constraint(row(name("marg", {k, a, x}), std::move(terms), Relation::equal, 0));
        }
        for (std::size_t y = 0; y < L; ++y) {
            std::vector<Term> terms;
            for (std::size_t x = 0; x < L; ++x)
                terms.push_back({edge_var(k, x, y), 1});
            terms.push_back({node_var(b, y), -1});
            instance.add_constraint(row(name("marg", {k, b, y}), std::move(terms), Relation::equal, 0));
        }
    }
    return base;
}

} // namespace

IlpInstance mrf_to_ilp(const MrfModel& model)
{
    IlpInstance instance;
    add_local_polytope(instance, model);
    return instance;
}

IlpInstance generate_mrf(const MrfParams& params, std::uint64_t seed)
{
    return mrf_to_ilp(generate_mrf_model(params, seed));
}

std::optional<std::vector<std::size_t>> decode_labeling(const MrfModel& model, std::span<const std::uint8_t> x)
{
    std::vector<std::size_t> labeling(model.num_nodes());
    for (std::size_t v = 0; v < model.num_nodes(); ++v) {
        std::size_t ones = 0;
        for (std::size_t l = 0; l < model.labels; ++l)
            if (x[v * model.labels + l]) {
                ++ones;
                labeling[v] = l;
            }
        if (ones != 1)
            return std::nullopt;
    }
    return labeling;
}

IlpInstance generate_graph_matching(const GraphMatchingParams& params, std::uint64_t seed)
{
    require(params.left > 0 && params.right > 0, "both point sets must be nonempty");
    require(params.pair_density >= 0.0 && params.pair_density <= 1.0, "pair density must lie in [0, 1]");
    Rng rng(seed);
    const std::size_t L = params.left;
    const std::size_t R = params.right;
    IlpInstance instance;
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t r = 0; r < R; ++r)
            instance.add_variable(name("m", {l, r}), rng.potential());
    auto mu = [&](std::size_t l, std::size_t r) { return l * R + r; };

    // nu_{l l' r r'}: l matched to r together with l' matched to r'.
    struct Pair {
        std::size_t l, lp, r, rp, var;
    };
    std::vector<Pair> pairs;
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t lp = 0; lp < L; ++lp)
            for (std::size_t r = 0; r < R; ++r)
                for (std::size_t rp = 0; rp < R; ++rp) {
                    if (l == lp || r == rp || !rng.chance(params.pair_density))
                        continue;
                    const std::size_t v = instance.add_variable(name("n", {l, lp, r, rp}), rng.potential());
                    pairs.push_back({l, lp, r, rp, v});
                }

    for (std::size_t l = 0; l < L; ++l) {
        std::vector<Term> terms;
        for (std::size_t r = 0; r < R; ++r)
            terms.push_back({mu(l, r), 1});
        instance.add_constraint(row(name("left", {l}), std::move(terms), Relation::less_equal, 1));
    }
    for (std::size_t r = 0; r < R; ++r) {
        std::vector<Term> terms;
        for (std::size_t l = 0; l < L; ++l)
            terms.push_back({mu(l, r), 1});
        instance.add_constraint(row(name("right", {r}), std::move(terms), Relation::less_equal, 1));
    }
    for (int side = 0; side < 2; ++side)
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t r = 0; r < R; ++r) {
                std::vector<Term> terms{{mu(l, r), 1}};
                for (const Pair& p : pairs) {
                    const bool hit = side == 0 ? (p.l == l && p.r == r) : (p.lp == l && p.rp == r);
                    if (hit)
                        terms.push_back({p.var, -1});
                }
                instance.add_constraint(
                    row(name(side == 0 ? "lin_out" : "lin_in", {l, r}), std::move(terms), Relation::equal, 0));
            }
    return instance;
}

IlpInstance generate_tomography(const TomographyParams& params, std::uint64_t seed)
{
    MrfModel model = generate_mrf_model({params.rows, params.cols, params.labels}, seed);
    // Separate stream for the hidden object so the potentials match the MRF
    // generator under the same seed.
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::size_t> hidden(model.num_nodes());
    for (auto& h : hidden)
        h = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(params.labels) - 1));

    IlpInstance instance;
    const std::size_t base = add_local_polytope(instance, model);
    auto projection = [&](std::string row_name, const std::vector<std::size_t>& nodes) {
        std::vector<Term> terms;
        std::int64_t b = 0;
        for (std::size_t v : nodes) {
            b += static_cast<std::int64_t>(hidden[v]);
            for (std::size_t x = 1; x < params.labels; ++x)
                terms.push_back({base + v * params.labels + x, static_cast<std::int64_t>(x)});
        }
        instance.add_constraint(row(std::move(row_name), std::move(terms), Relation::equal, b));
    };
    for (std::size_t r = 0; r < params.rows; ++r) {
        std::vector<std::size_t> nodes;
        for (std::size_t c = 0; c < params.cols; ++c)
            nodes.push_back(r * params.cols + c);
        projection(name("proj_row", {r}), nodes);
    }
    for (std::size_t c = 0; c < params.cols; ++c) {
        std::vector<std::size_t> nodes;
        for (std::size_t r = 0; r < params.rows; ++r)
            nodes.push_back(r * params.cols + c);
        projection(name("proj_col", {c}), nodes);
    }
    return instance;
}

IlpInstance generate_cell_tracking(const CellTrackingParams& params, std::uint64_t seed)
{
    require(params.frames >= 2, "cell tracking needs at least two frames");
    require(params.cells >= 1, "cell tracking needs at least one detection per frame");
    require(params.transition_density >= 0.0 && params.transition_density <= 1.0,
            "transition density must lie in [0, 1]");
    require(params.division_density >= 0.0 && params.division_density <= 1.0, "division density must lie in [0, 1]");
    Rng rng(seed);
    const std::size_t T = params.frames;
    const std::size_t K = params.cells;
    IlpInstance instance;
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t k = 0; k < K; ++k)
            instance.add_variable(name("x", {t, k}), rng.potential());
    auto det = [&](std::size_t t, std::size_t k) { return t * K + k; };

    std::vector<std::vector<std::size_t>> out(T * K), in(T * K);
    for (std::size_t t = 0; t + 1 < T; ++t)
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j) {
                if (!rng.chance(params.transition_density))
                    continue;
                const std::size_t v = instance.add_variable(name("y", {t, i, j}), rng.potential());
                out[det(t, i)].push_back(v);
                in[det(t + 1, j)].push_back(v);
            }
    for (std::size_t t = 0; t + 1 < T; ++t)
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j)
                for (std::size_t k = j + 1; k < K; ++k) {
                    if (!rng.chance(params.division_density))
                        continue;
                    const std::size_t v = instance.add_variable(name("d", {t, i, j, k}), rng.potential());
                    out[det(t, i)].push_back(v);
                    in[det(t + 1, j)].push_back(v);
                    in[det(t + 1, k)].push_back(v);
                }

    auto flow = [&](std::string row_name, std::size_t node, const std::vector<std::size_t>& arcs) {
        std::vector<Term> terms{{node, 1}};
        for (std::size_t v : arcs)
            terms.push_back({v, -1});
        instance.add_constraint(row(std::move(row_name), std::move(terms), Relation::equal, 0));
    };
    for (std::size_t t = 0; t + 1 < T; ++t)
        for (std::size_t k = 0; k < K; ++k)
            flow(name("out", {t, k}), det(t, k), out[det(t, k)]);
    for (std::size_t t = 1; t < T; ++t)
        for (std::size_t k = 0; k < K; ++k)
            flow(name("in", {t, k}), det(t, k), in[det(t, k)]);

    if (K >= 2)
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t c = 0; c < params.conflicts; ++c) {
                const auto a = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(K) - 2));
                const auto b = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(a) + 1,
                                                                    static_cast<std::int64_t>(K) - 1));
                instance.add_constraint(row(name("conflict", {t, c}), {{det(t, a), 1}, {det(t, b), 1}},
                                            Relation::less_equal, 1));
            }
    return instance;
}

std::string_view to_string(GeneratorKind kind)
{
    switch (kind) {
    case GeneratorKind::random_ilp:
        return "random_ilp";
    case GeneratorKind::mrf:
        return "mrf";
    case GeneratorKind::graph_matching:
        return "graph_matching";
    case GeneratorKind::tomography:
        return "tomography";
    case GeneratorKind::cell_tracking:
        return "cell_tracking";
    }
    return "?";
}

std::optional<GeneratorKind> parse_generator_kind(std::string_view name)
{
    for (GeneratorKind k : {GeneratorKind::random_ilp, GeneratorKind::mrf, GeneratorKind::graph_matching,
                            GeneratorKind::tomography, GeneratorKind::cell_tracking})
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

} // namespace bddmp
