#include "specrad/weights.hpp"

#include <bit>
#include <cmath>
#include <random>

#include <absl/container/flat_hash_map.h>

#include "specrad/errors.hpp"
#include "specrad/fourier.hpp"

namespace specrad {

std::string to_string(WeightKind k) {
    switch (k) {
    case WeightKind::MaxTower: return "max-tower";
    case WeightKind::Polynomial: return "polynomial-length";
    case WeightKind::Table: return "custom table";
    }
    return "custom table";
}

namespace {

void require_tower(const Group& g) {
    auto k = g.id().kind;
    if (k != GroupKind::SymmetricTower && k != GroupKind::BooleanSum)
        throw InvalidInput(g.name() + " is not a catalog tower");
}

}  // namespace

std::size_t tower_depth(const Group& g) {
    require_tower(g);
    // S_2 .. S_16, or one level per generator letter.
    return g.id().kind == GroupKind::SymmetricTower ? 15 : g.generators().size();
}

std::size_t tower_level(const Group& g, const GroupElement& x) {
    require_tower(g);
    if (g.id().kind == GroupKind::SymmetricTower) {
        if (x.word.empty())
            return 1;
        auto u = static_cast<std::uint64_t>(x.word[0]);
        auto degree = static_cast<std::size_t>((std::bit_width(u) + 3) / 4);
        return degree <= 2 ? 1 : degree - 1;
    }
    std::size_t top = 0;
    for (std::size_t w = 0; w < x.word.size(); ++w) {
        auto u = static_cast<std::uint64_t>(x.word[w]);
        if (u)
            top = 64 * w + static_cast<std::size_t>(std::bit_width(u));
    }
    return std::max<std::size_t>(top, 1);
}

double tower_order(const Group& g, std::size_t i) {
    require_tower(g);
    if (g.id().kind == GroupKind::SymmetricTower) {
        double f = 1.0;
        for (std::size_t k = 2; k <= i + 1; ++k)
            f *= static_cast<double>(k);
        return f;
    }
    return std::ldexp(1.0, static_cast<int>(i));
}

Weight Weight::polynomial(const Group& g, double alpha) {
    if (alpha < 0)
        throw InvalidInput("polynomial weight needs alpha >= 0");
    const Group* gp = &g;
    return Weight(g, WeightKind::Polynomial,
                  [gp, alpha](const GroupElement& x) {
                      return std::pow(1.0 + static_cast<double>(gp->word_length(x)), alpha);
                  },
                  {{"alpha", alpha}});
}

Weight Weight::table(const Group& g, const std::vector<std::pair<GroupElement, double>>& values) {
    auto map = std::make_shared<absl::flat_hash_map<GroupElement, double, ElementHash>>();
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [x, v] : values) {
        if (v < 1.0)
            throw InvalidInput("weight values must be >= 1");
        (*map)[x] = v;
        t[g.format(x)] = v;
    }
    return Weight(g, WeightKind::Table,
                  [map](const GroupElement& x) {
                      auto it = map->find(x);
                      return it == map->end() ? 1.0 : it->second;
                  },
                  {{"table", t}});
}

std::vector<double> default_tower_sequence(const Group& g, std::size_t levels) {
    std::vector<double> n;
    for (std::size_t i = 1; i < levels; ++i)
        n.push_back(static_cast<double>(i * i) * tower_order(g, i + 1));
    return n;
}

Weight build_pytlik_weight(const Group& g, std::vector<double> n_seq) {
    require_tower(g);
    if (n_seq.empty())
        n_seq = default_tower_sequence(g, tower_depth(g));
    for (std::size_t i = 0; i < n_seq.size(); ++i) {
        if (n_seq[i] <= 0 || (i > 0 && n_seq[i] <= n_seq[i - 1]))
            throw InvalidInput("tower sequence n_i must be positive and strictly increasing");
    }
    const Group* gp = &g;
    auto seq = std::make_shared<std::vector<double>>(n_seq);
    return Weight(g, WeightKind::MaxTower,
                  [gp, seq](const GroupElement& x) {
                      std::size_t L = tower_level(*gp, x);
                      if (L == 1)
                          return 1.0;
                      if (L - 1 > seq->size())
                          throw InvalidInput("element lies above the configured tower levels");
                      return 1.0 + (*seq)[L - 2];
                  },
                  {{"n", n_seq}});
}

std::vector<double> inverse_weight_partial_sums(const Weight& w, std::size_t levels) {
    if (w.kind() != WeightKind::MaxTower)
        throw InvalidInput("partial sums need a tower weight");
    const auto& n = w.params().at("n");
    const Group& g = w.group();
    std::vector<double> out;
    double s = tower_order(g, 1);
    out.push_back(s);
    for (std::size_t i = 1; i < levels && i <= n.size(); ++i) {
        s += (tower_order(g, i + 1) - tower_order(g, i)) / (1.0 + n[i - 1].get<double>());
        out.push_back(s);
    }
    return out;
}

nlohmann::json weight_table(const Weight& w, const std::vector<GroupElement>& elements) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& x : elements)
        t[w.group().format(x)] = w(x);
    return t;
}

double weighted_norm(const AlgebraElement& f, const Weight& w) {
    CompensatedSum s;
    for (const auto& [x, c] : f.terms())
        s.add(std::abs(c) * w(x));
    return s.value();
}

ExperimentReport check_differential_inequality(const AlgebraElement& f, const Weight& w, double K, double theta,
                                               double tol) {
    if (theta < 0 || theta >= 1)
        throw InvalidInput("theta must lie in [0, 1)");
    ExperimentReport r;
    r.kind = "differential";
    r.group = f.group().name();
    r.tolerance = tol;
    r.inputs["K"] = K;
    r.inputs["theta"] = theta;
    r.inputs["weight"] = to_string(w.kind());
    const double lhs = weighted_norm(convolve(f, f), w);
    const double base = std::pow(weighted_norm(f, w), 1 + theta) * std::pow(p_norm(f, 1.0), 1 - theta);
    r.add(Quantity::exact_value("||f*f||_(1,w)", lhs, "exact convolution"));
    r.add(Quantity::exact_value("K ||f||_(1,w)^(1+theta) ||f||_1^(1-theta)", K * base, "exact"));
    r.compare("||f*f||_(1,w)", "K ||f||_(1,w)^(1+theta) ||f||_1^(1-theta)");
    r.details["min_feasible_K"] = base > 0 ? lhs / base : 0.0;
    r.finalize();
    return r;
}

ExperimentReport differential_sweep(const Weight& w, double K, double theta, std::size_t samples, std::size_t terms,
                                    std::size_t radius, std::uint64_t seed, double tol) {
    const Group& g = w.group();
    auto pool = element_pool(g, radius);
    std::mt19937_64 rng(seed);
    ExperimentReport agg;
    agg.kind = "differential";
    agg.group = g.name();
    agg.tolerance = tol;
    agg.inputs = {{"K", K}, {"theta", theta}, {"samples", samples}, {"terms", terms},
                  {"radius", radius}, {"seed", seed}, {"weight", to_string(w.kind())}};
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        auto f = random_hermitian(g, pool, terms, rng);
        auto r = check_differential_inequality(f, w, K, theta, tol);
        std::string tag = "sample" + std::to_string(i) + ".";
        for (auto q : r.quantities) {
            q.name = tag + q.name;
            agg.add(std::move(q));
        }
        agg.compare(tag + "||f*f||_(1,w)", tag + "K ||f||_(1,w)^(1+theta) ||f||_1^(1-theta)");
        worst = std::max(worst, r.details["min_feasible_K"].get<double>());
    }
    agg.details["min_feasible_K"] = worst;
    agg.finalize();
    return agg;
}

ExperimentReport check_pytlik_radius_equality(const AlgebraElement& f, const Weight& w, std::size_t doublings,
                                              double agreement, const LabOptions& opt) {
    const Group& g = f.group();
    if (!g.is_locally_finite())
        throw InvalidInput("radius equality check needs a locally finite group");
    if (!f.is_hermitian())
        throw InvalidInput("radius equality check needs a Hermitian element");

    ExperimentReport r;
    r.kind = "pytlik";
    r.group = g.name();
    r.tolerance = opt.tol;
    r.inputs["doublings"] = doublings;
    r.inputs["agreement"] = agreement;
    r.inputs["weight"] = w.params();

    Certificate plain{"||f^(2^k)||_1^(2^-k)", {}, {}};
    Certificate weighted{"||f^(2^k)||_(1,w)^(2^-k)", {}, {}};
    AlgebraElement fk = f;
    double scale = 1.0;
    for (std::size_t k = 0; k <= doublings; ++k) {
        if (k > 0) {
            fk = convolve(fk, fk, opt.policy);
            scale *= 0.5;
        }
        plain.push(static_cast<double>(k), std::pow(p_norm(fk, 1.0), scale));
        weighted.push(static_cast<double>(k), std::pow(weighted_norm(fk, w), scale));
    }
    auto bracket_of = [](const std::string& name, const Certificate& c) {
        Quantity q = Quantity::bracket(name, 0.0, *std::min_element(c.values.begin(), c.values.end()),
                                       c.label);
        q.upper_certificate = c;
        std::size_t n = c.values.size();
        q.estimate = n >= 2 ? richardson(c.values[n - 2], c.values[n - 1]) : c.values.back();
        return q;
    };
    Quantity qp = bracket_of("r_l1(f)", plain);
    Quantity qw = bracket_of("r_l1w(f)", weighted);
    auto oracle = coinciding_radius_oracle(f);
    Quantity qe = *oracle;
    qe.name = "exact radius";
    qp.lower = qw.lower = qe.lower;
    qp.method += "; lower from the exact radius";
    qw.method += "; lower from the exact radius";
    r.add(qe);
    r.add(qp);
    r.add(qw);
    r.compare("exact radius", "r_l1(f)", false, "exact value below the l1 power certificate");
    r.compare("exact radius", "r_l1w(f)", false, "exact value below the weighted power certificate");

    const double exact = 0.5 * (qe.lower + qe.upper);
    double dp = std::abs(*qp.estimate - exact), dw = std::abs(*qw.estimate - exact);
    r.details["exact"] = exact;
    r.details["l1_estimate"] = *qp.estimate;
    r.details["weighted_estimate"] = *qw.estimate;
    r.details["l1_deviation"] = dp;
    r.details["weighted_deviation"] = dw;
    bool agree = dp <= agreement && dw <= agreement;
    r.details["agreement"] = agree;
    r.finalize();
    if (!agree && r.verdict == Verdict::Pass) {
        r.verdict = Verdict::Inconclusive;
        r.notes.push_back("Richardson estimates miss the exact radius by more than the agreement tolerance");
    }
    return r;
}

}  // namespace specrad
