#include "specrad/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "specrad/errors.hpp"
#include "specrad/serialize.hpp"
#include "specrad/weights.hpp"

namespace specrad {

std::string to_string(RunStatus s) {
    switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::BudgetAbort: return "budget_abort";
    case RunStatus::Rejected: return "rejected";
    }
    return "rejected";
}

namespace {

/// Field access that remembers which keys were read, so that unknown keys
/// can be reported.
class Fields {
public:
    Fields(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j.is_object())
            throw SchemaError(where_ + " must be an object");
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return j_.contains(key);
    }

    const nlohmann::json& at(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key))
            throw SchemaError(where_ + ": missing field '" + key + "'");
        return j_.at(key);
    }

    std::string str(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_string())
            throw SchemaError(where_ + ": '" + key + "' must be a string");
        return v.get<std::string>();
    }

    std::size_t count(const std::string& key, std::size_t def) {
        if (!has(key))
            return def;
        const auto& v = j_.at(key);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
            throw SchemaError(where_ + ": '" + key + "' must be a nonnegative integer");
        return v.get<std::size_t>();
    }

    double real(const std::string& key, double def) {
        if (!has(key))
            return def;
        const auto& v = j_.at(key);
        if (!v.is_number() || !std::isfinite(v.get<double>()))
            throw SchemaError(where_ + ": '" + key + "' must be a finite number");
        return v.get<double>();
    }

    bool flag(const std::string& key, bool def) {
        if (!has(key))
            return def;
        const auto& v = j_.at(key);
        if (!v.is_boolean())
            throw SchemaError(where_ + ": '" + key + "' must be a boolean");
        return v.get<bool>();
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!used_.contains(k))
                throw SchemaError(where_ + ": unknown field '" + k + "'");
    }

    const std::string& where() const { return where_; }

private:
    const nlohmann::json& j_;
    std::string where_;
    std::set<std::string> used_;
};

Exponent exponent_of(const nlohmann::json& v, const std::string& where) {
    try {
        if (v.is_string())
            return Exponent::parse(v.get<std::string>());
        if (v.is_number())
            return Exponent::from_double(v.get<double>());
    } catch (const InvalidInput& e) {
        throw SchemaError(where + ": " + e.what());
    }
    throw SchemaError(where + ": exponent must be a string such as \"3/2\" or a number");
}

std::vector<Exponent> exponent_list(Fields& f, const std::string& key, std::vector<std::string> def) {
    std::vector<Exponent> out;
    if (!f.has(key)) {
        for (const auto& s : def)
            out.push_back(Exponent::parse(s));
        return out;
    }
    const auto& v = f.at(key);
    if (!v.is_array() || v.empty())
        throw SchemaError(f.where() + ": '" + key + "' must be a nonempty list");
    for (const auto& x : v)
        out.push_back(exponent_of(x, f.where()));
    return out;
}

GroupElement word_of(const Group& g, const nlohmann::json& v, const std::string& where) {
    if (!v.is_string())
        throw SchemaError(where + ": group words must be strings");
    try {
        return g.parse(v.get<std::string>());
    } catch (const InvalidInput& e) {
        throw SchemaError(where + ": " + e.what());
    }
}

void apply_budgets(Fields& f, LabOptions& opt) {
    if (!f.has("budgets"))
        return;
    Fields b(f.at("budgets"), f.where() + ".budgets");
    opt.policy.max_support = b.count("max_support", opt.policy.max_support);
    opt.growth_budget = b.count("growth_budget", opt.growth_budget);
    opt.growth_levels = b.count("growth_levels", opt.growth_levels);
    opt.max_doublings = b.count("max_doublings", opt.max_doublings);
    opt.max_moments = b.count("max_moments", opt.max_moments);
    opt.radius = b.count("radius", opt.radius);
    opt.truncation.max_iters = b.count("max_iters", opt.truncation.max_iters);
    opt.truncation.max_ball = b.count("max_ball", opt.truncation.max_ball);
    opt.lp.radius = b.count("lp_radius", opt.lp.radius);
    opt.lp.ball_budget = b.count("lp_ball_budget", opt.lp.ball_budget);
    opt.lp.power_iters = b.count("power_iters", opt.lp.power_iters);
    opt.lp.u2_doublings = b.count("u2_doublings", opt.lp.u2_doublings);
    opt.lp.policy.max_support = b.count("lp_max_support", opt.lp.policy.max_support);
    opt.policy.prune_threshold = b.real("prune_threshold", opt.policy.prune_threshold);
    if (opt.policy.prune_threshold < 0)
        throw SchemaError(b.where() + ": prune_threshold must be >= 0");
    b.finish();
}

struct Context {
    const Group* group = nullptr;
    LabOptions opt;
    std::filesystem::path base_dir;
};

bool support_generators(Fields& f) { return f.has("generators") && f.at("generators") == "support"; }

GeneratingSet generating_set(Fields& f, const Context& c) {
    bool with_e = f.flag("with_identity", true);
    if (!f.has("generators") || support_generators(f))
        return GeneratingSet::standard(*c.group, with_e);
    const auto& v = f.at("generators");
    if (!v.is_array() || v.empty())
        throw SchemaError(f.where() + ": 'generators' must be a nonempty list of words");
    std::vector<GroupElement> xs;
    for (const auto& w : v)
        xs.push_back(word_of(*c.group, w, f.where()));
    GeneratingSet S(*c.group, std::move(xs));
    return with_e ? S.with_identity() : S;
}

AlgebraElement element_of(Fields& f, const Context& c, const GeneratingSet& S) {
    if (!f.has("element"))
        return AlgebraElement::normalized_indicator(S);
    const auto& v = f.at("element");
    if (v.is_array())
        return algebra_from_json(*c.group, v);
    Fields e(v, f.where() + ".element");
    if (e.has("indicator")) {
        e.flag("indicator", true);
        e.finish();
        return AlgebraElement::normalized_indicator(S);
    }
    if (e.has("file")) {
        std::filesystem::path p = e.str("file");
        e.finish();
        if (p.is_relative())
            p = c.base_dir / p;
        std::ifstream in(p);
        if (!in)
            throw SchemaError(e.where() + ": cannot read " + p.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& ex) {
            throw SchemaError(e.where() + ": " + ex.what());
        }
        return algebra_from_json(*c.group, j);
    }
    if (e.has("random")) {
        Fields r(e.at("random"), e.where() + ".random");
        std::size_t terms = r.count("terms", 4);
        std::size_t radius = r.count("radius", 2);
        std::uint64_t seed = r.count("seed", 1);
        bool real = r.flag("real", false);
        r.finish();
        e.finish();
        std::mt19937_64 rng(seed);
        return random_hermitian(*c.group, element_pool(*c.group, radius), terms, rng, real);
    }
    throw SchemaError(e.where() + ": expected 'indicator', 'file' or 'random'");
}

/// The element and S; "generators": "support" makes S the symmetrized
/// support of the element (plus e unless with_identity is false).
std::pair<GeneratingSet, AlgebraElement> set_and_element(Fields& f, const Context& c) {
    auto S = generating_set(f, c);
    auto fe = element_of(f, c, S);
    if (!support_generators(f))
        return {S, fe};
    GeneratingSet T(*c.group, fe.support());
    T = T.symmetrized();
    if (f.flag("with_identity", true))
        T = T.with_identity();
    return {T, fe};
}

using Handler = std::function<std::function<ExperimentReport()>(Fields&, const Context&)>;

std::function<ExperimentReport()> growth_job(Fields& f, const Context& c) {
    auto S = generating_set(f, c);
    std::size_t levels = f.count("levels", c.opt.growth_levels);
    if (levels < 2)
        throw SchemaError(f.where() + ": 'levels' must be at least 2");
    auto opt = c.opt;
    return [S, levels, opt] {
        auto seq = product_set_sequence(S, levels, {opt.growth_budget, true});
        ExperimentReport r;
        r.kind = "growth";
        r.group = S.group().name();
        r.tolerance = opt.tol;
        r.inputs = {{"levels", levels}, {"S_size", S.size()}, {"contains_identity", S.contains_identity()}};
        std::vector<double> sizes(seq.sizes.begin(), seq.sizes.end());
        r.details["sizes"] = sizes;
        if (!seq.complete) {
            r.budget_exhausted = true;
            r.notes.push_back("stopped after n = " + std::to_string(seq.sizes.size()));
        }
        if (seq.sizes.size() >= 2)
            r.add(Quantity::from_estimate("nu_S", growth_rate_estimate(seq)));
        double worst = 0.0;
        for (std::size_t m = 1; m <= seq.sizes.size(); ++m)
            for (std::size_t n = 1; m + n <= seq.sizes.size(); ++n)
                worst = std::max(worst, static_cast<double>(seq.sizes[m + n - 1]) /
                                            (static_cast<double>(seq.sizes[m - 1]) *
                                             static_cast<double>(seq.sizes[n - 1])));
        if (seq.sizes.size() >= 2) {
            r.add(Quantity::exact_value("max |S^(m+n)| / (|S^m| |S^n|)", worst, "exact counts"));
            r.add(Quantity::exact_value("1", 1.0, "constant"));
            r.compare("max |S^(m+n)| / (|S^m| |S^n|)", "1", false, "submultiplicativity");
        }
        r.finalize();
        return r;
    };
}

std::function<ExperimentReport()> spectrum_job(Fields& f, const Context& c) {
    auto S = generating_set(f, c);
    auto fe = element_of(f, c, S);
    auto ps = exponent_list(f, "exponents", {"3/2"});
    auto opt = c.opt;
    return [fe, ps, opt] {
        ExperimentReport r;
        r.kind = "spectrum";
        r.group = fe.group().name();
        r.tolerance = opt.tol;
        r.inputs["element"] = algebra_to_json(fe);
        bool herm = fe.is_hermitian();
        r.inputs["hermitian"] = herm;
        auto oracle = coinciding_radius_oracle(fe);
        r.add(Quantity::exact_value("||f||_1", p_norm(fe, 1.0), "exact"));

        auto l1 = l1_spectral_radius(fe, opt.max_doublings, opt.policy);
        Quantity ql1 = Quantity::from_estimate("r_l1(f)", l1);
        auto tr = cstar_norm_lower_truncation(fe, opt.radius, opt.truncation);
        auto u2 = l2_norm_upper(fe, opt.lp.u2_doublings, opt.lp.policy);
        Quantity qn = Quantity::bracket("||lambda(f)||", tr.value, u2.values.back(), "truncation / l1 doubling");
        qn.lower_certificate.label = "l2 truncation";
        qn.lower_certificate.push(static_cast<double>(tr.radius), tr.value);
        qn.upper_certificate = u2;
        r.details["truncation"] = {{"radius", tr.radius}, {"ball_size", tr.ball_size},
                                   {"iterations", tr.iterations}, {"converged", tr.converged}};
        bool complete = l1.complete;
        if (herm) {
            auto cs = cstar_radius_hermitian(fe, opt.max_moments, opt.policy);
            Quantity qc = Quantity::from_estimate("r_cstar(f)", cs);
            if (tr.value > qc.lower) {
                qc.lower = tr.value;
                qc.lower_certificate.push(-static_cast<double>(tr.radius), tr.value);
            }
            qc.upper = std::min(qc.upper, qn.upper);
            if (oracle) {
                qc.lower = std::max(qc.lower, oracle->lower);
                qc.upper = std::min(qc.upper, oracle->upper);
            }
            ql1.lower = std::max(ql1.lower, qc.lower);
            r.add(qc);
            complete = complete && cs.complete;
        }
        if (oracle) {
            ql1.lower = std::max(ql1.lower, oracle->lower);
            ql1.upper = std::min(ql1.upper, oracle->upper);
            r.add(*oracle);
        }
        r.add(ql1);
        r.add(qn);
        r.compare("r_l1(f)", "||f||_1", false, "radius below norm");
        r.compare("||lambda(f)||", "||f||_1", false, "l2 operator norm below l1 norm");
        nlohmann::json overlap = nlohmann::json::object();
        for (const auto& p : ps) {
            auto pf = pfstar_norm_bounds(fe, p, opt.lp);
            std::string name = "||f||_PF*_" + p.str();
            r.add(Quantity::from_estimate(name, pf));
            r.compare(name, "||f||_1", false, "PF*_p norm below l1 norm");
            overlap[p.str()] = qn.lower <= pf.upper * (1 + opt.tol);
            complete = complete && pf.complete;
        }
        r.details["cstar_lower_below_pf_upper"] = overlap;
        r.budget_exhausted = !complete;
        r.finalize();
        return r;
    };
}

std::function<ExperimentReport()> kesten_job(Fields& f, const Context& c) {
    auto S = generating_set(f, c);
    auto opt = c.opt;
    opt.kesten_tol = f.real("kesten_tol", opt.kesten_tol);
    return [S, opt] { return kesten_amenability_probe(S, opt); };
}

std::function<ExperimentReport()> kesten_lemma_job(Fields& f, const Context& c) {
    auto S = generating_set(f, c);
    auto ps = exponent_list(f, "exponents", {"3/2"});
    auto opt = c.opt;
    return [S, ps, opt] {
        ExperimentReport agg;
        agg.kind = "kesten_lemma";
        agg.group = S.group().name();
        agg.tolerance = opt.tol;
        nlohmann::json plist = nlohmann::json::array();
        for (const auto& p : ps) {
            plist.push_back(p.str());
            absorb(agg, check_kesten_growth_lemma(S, p, opt), "p=" + p.str() + ".");
        }
        agg.inputs = {{"p", plist}, {"S_size", S.size()}};
        agg.finalize();
        return agg;
    };
}

std::function<ExperimentReport()> jenkins_job(Fields& f, const Context& c) {
    const Group& g = *c.group;
    auto pair = g.free_semigroup_pair();
    std::optional<GroupElement> s, t;
    if (pair) {
        s = pair->first;
        t = pair->second;
    }
    if (f.has("s"))
        s = word_of(g, f.at("s"), f.where());
    if (f.has("t"))
        t = word_of(g, f.at("t"), f.where());
    if (!s || !t)
        throw SchemaError(f.where() + ": " + g.name() + " has no default free pair; give 's' and 't'");
    WitnessCoefficients w;
    if (f.has("coefficients")) {
        const auto& v = f.at("coefficients");
        if (!v.is_array() || v.size() != 3)
            throw SchemaError(f.where() + ": 'coefficients' must be three [re, im] pairs");
        Complex a[3];
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& z = v[i];
            if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
                throw SchemaError(f.where() + ": 'coefficients' must be three [re, im] pairs");
            a[i] = Complex(z[0].get<double>(), z[1].get<double>());
        }
        w = {a[0], a[1], a[2]};
    }
    std::size_t n_max = f.count("n_max", 10);
    std::size_t g_moments = f.count("g_moments", 200);
    if (n_max < 1)
        throw SchemaError(f.where() + ": 'n_max' must be positive");
    auto opt = c.opt;
    GroupElement ss = *s, tt = *t;
    return [&g, ss, tt, w, n_max, g_moments, opt] { return jenkins_witness(g, ss, tt, w, n_max, opt, g_moments); };
}

std::function<ExperimentReport()> interpolate_job(Fields& f, const Context& c) {
    auto S = generating_set(f, c);
    auto fe = element_of(f, c, S);
    std::vector<InterpolationParams> triples;
    if (f.has("triples")) {
        const auto& v = f.at("triples");
        if (!v.is_array() || v.empty())
            throw SchemaError(f.where() + ": 'triples' must be a nonempty list");
        for (const auto& t : v) {
            if (!t.is_array() || t.size() != 3)
                throw SchemaError(f.where() + ": each triple must list p1, p2, p3");
            try {
                triples.push_back(InterpolationParams::make(exponent_of(t[0], f.where()),
                                                            exponent_of(t[1], f.where()),
                                                            exponent_of(t[2], f.where())));
            } catch (const InvalidInput& e) {
                throw SchemaError(f.where() + ": " + e.what());
            }
        }
    } else {
        triples.push_back(InterpolationParams::make(Exponent::parse("5/4"), Exponent::parse("3/2"),
                                                    Exponent::parse("7/4")));
    }
    auto opt = c.opt;
    return [fe, triples, opt] {
        ExperimentReport agg;
        agg.kind = "interpolate";
        agg.group = fe.group().name();
        agg.tolerance = opt.tol;
        agg.inputs["element"] = algebra_to_json(fe);
        auto list = nlohmann::json::array();
        for (const auto& ip : triples) {
            std::string tag = ip.p1.str() + "," + ip.p2.str() + "," + ip.p3.str() + ".";
            list.push_back({ip.p1.str(), ip.p2.str(), ip.p3.str()});
            absorb(agg, check_pf_interpolation(fe, ip, opt), tag);
        }
        agg.inputs["triples"] = list;
        agg.finalize();
        return agg;
    };
}

std::function<ExperimentReport()> growth_chain_job(Fields& f, const Context& c) {
    auto [S, fe] = set_and_element(f, c);
    auto ps = exponent_list(f, "exponents", {"3/2"});
    std::size_t n_max = f.count("n", 6);
    if (n_max < 1)
        throw SchemaError(f.where() + ": 'n' must be positive");
    auto opt = c.opt;
    return [S, fe, ps, n_max, opt] {
        ExperimentReport agg;
        agg.kind = "growth_chain";
        agg.group = fe.group().name();
        agg.tolerance = opt.tol;
        auto plist = nlohmann::json::array();
        auto reports = growth_chain_grid(fe, S, ps, n_max, opt);
        for (const auto& r : reports)
            absorb(agg, r, "p=" + r.inputs["p"].get<std::string>() + ",n=" + r.inputs["n"].dump() + ".");
        for (const auto& p : ps)
            plist.push_back(p.str());
        agg.inputs = {{"p", plist}, {"n", n_max}, {"element", algebra_to_json(fe)}};
        agg.finalize();
        return agg;
    };
}

std::function<ExperimentReport()> spectral_growth_job(Fields& f, const Context& c) {
    auto [S, fe] = set_and_element(f, c);
    auto qs = exponent_list(f, "exponents", {"4"});
    auto opt = c.opt;
    return [S, fe, qs, opt] {
        ExperimentReport agg;
        agg.kind = "spectral_growth";
        agg.group = fe.group().name();
        agg.tolerance = opt.tol;
        auto list = nlohmann::json::array();
        for (const auto& q : qs) {
            list.push_back(q.str());
            absorb(agg, check_spectral_growth_bound(fe, S, q, opt), "q=" + q.str() + ".");
        }
        agg.inputs = {{"q", list}, {"element", algebra_to_json(fe)}};
        agg.finalize();
        return agg;
    };
}

std::function<ExperimentReport()> rd_bound_job(Fields& f, const Context& c) {
    auto S = generating_set(f, c);
    auto fe = element_of(f, c, S);
    double alpha = f.real("alpha", 2.0);
    double C = f.real("C", 2.0);
    auto opt = c.opt;
    return [fe, alpha, C, opt] {
        auto r = check_rd_bound(fe, alpha, C, opt);
        r.inputs["element"] = algebra_to_json(fe);
        return r;
    };
}

std::function<ExperimentReport()> rd_search_job(Fields& f, const Context& c) {
    const Group& g = *c.group;
    double alpha = f.real("alpha", 2.0);
    double C = f.real("C", 2.0);
    std::size_t radius = f.count("sphere_radius", 3);
    std::size_t samples = f.count("samples", 10);
    std::uint64_t seed = f.count("seed", 1);
    auto opt = c.opt;
    return [&g, alpha, C, radius, samples, seed, opt] {
        return rd_falsifier_search(g, alpha, C, radius, samples, seed, opt);
    };
}

Weight weight_of(Fields& f, const Context& c) {
    if (!f.has("weight"))
        return build_pytlik_weight(*c.group);
    Fields w(f.at("weight"), f.where() + ".weight");
    auto type = w.str("type");
    if (type == "tower") {
        std::vector<double> n;
        if (w.has("n_seq")) {
            const auto& v = w.at("n_seq");
            if (!v.is_array())
                throw SchemaError(w.where() + ": 'n_seq' must be a list of numbers");
            for (const auto& x : v) {
                if (!x.is_number())
                    throw SchemaError(w.where() + ": 'n_seq' must be a list of numbers");
                n.push_back(x.get<double>());
            }
        }
        w.finish();
        try {
            return build_pytlik_weight(*c.group, n);
        } catch (const InvalidInput& e) {
            throw SchemaError(w.where() + ": " + e.what());
        }
    }
    if (type == "polynomial") {
        double alpha = w.real("alpha", 1.0);
        w.finish();
        try {
            return Weight::polynomial(*c.group, alpha);
        } catch (const InvalidInput& e) {
            throw SchemaError(w.where() + ": " + e.what());
        }
    }
    throw SchemaError(w.where() + ": 'type' must be \"tower\" or \"polynomial\"");
}

std::function<ExperimentReport()> pytlik_job(Fields& f, const Context& c) {
    auto S = generating_set(f, c);
    auto fe = element_of(f, c, S);
    auto w = weight_of(f, c);
    std::size_t doublings = f.count("doublings", 7);
    double agreement = f.real("agreement", 5e-3);
    auto opt = c.opt;
    return [fe, w, doublings, agreement, opt] {
        auto r = check_pytlik_radius_equality(fe, w, doublings, agreement, opt);
        r.inputs["element"] = algebra_to_json(fe);
        if (w.kind() == WeightKind::MaxTower) {
            r.details["inverse_weight_partial_sums"] = inverse_weight_partial_sums(w, 6);
            r.notes.push_back("partial sums of 1/w are reported; summability is not decided");
        }
        return r;
    };
}

std::function<ExperimentReport()> differential_job(Fields& f, const Context& c) {
    auto w = weight_of(f, c);
    double K = f.real("K", 1.0);
    double theta = f.real("theta", 0.0);
    if (theta < 0 || theta >= 1)
        throw SchemaError(f.where() + ": 'theta' must lie in [0, 1)");
    double tol = c.opt.tol;
    if (f.has("element")) {
        auto S = generating_set(f, c);
        auto fe = element_of(f, c, S);
        return [fe, w, K, theta, tol] { return check_differential_inequality(fe, w, K, theta, tol); };
    }
    std::size_t samples = f.count("samples", 20);
    std::size_t terms = f.count("terms", 4);
    std::size_t radius = f.count("radius", 3);
    std::uint64_t seed = f.count("seed", 1);
    return [w, K, theta, samples, terms, radius, seed, tol] {
        return differential_sweep(w, K, theta, samples, terms, radius, seed, tol);
    };
}

const std::vector<std::pair<std::string, Handler>>& handlers() {
    static const std::vector<std::pair<std::string, Handler>> h = {
        {"growth", growth_job},
        {"spectrum", spectrum_job},
        {"kesten", kesten_job},
        {"kesten_lemma", kesten_lemma_job},
        {"jenkins", jenkins_job},
        {"interpolate", interpolate_job},
        {"growth_chain", growth_chain_job},
        {"spectral_growth", spectral_growth_job},
        {"rd_bound", rd_bound_job},
        {"rd_search", rd_search_job},
        {"pytlik", pytlik_job},
        {"differential", differential_job},
    };
    return h;
}

Job bind_experiment(const nlohmann::json& spec, std::size_t index, const std::filesystem::path& base_dir,
                    const RunOptions& options) {
    Fields f(spec, "experiments[" + std::to_string(index) + "]");
    Job job;
    job.spec = spec;
    job.id = f.str("id");
    static const std::regex id_re("[A-Za-z0-9][A-Za-z0-9._-]*");
    if (!std::regex_match(job.id, id_re))
        throw SchemaError(f.where() + ": id '" + job.id + "' must match [A-Za-z0-9][A-Za-z0-9._-]*");
    job.kind = f.str("kind");
    f.has("note");

    Context c;
    c.base_dir = base_dir;
    try {
        c.group = &catalog_group(f.str("group"));
    } catch (const InvalidInput& e) {
        throw SchemaError(f.where() + ": " + e.what());
    }
    c.opt.tol = f.real("tolerance", c.opt.tol);
    apply_budgets(f, c.opt);
    if (options.tolerance)
        c.opt.tol = *options.tolerance;
    if (options.budget_elems) {
        std::size_t n = *options.budget_elems;
        c.opt.policy.max_support = n;
        c.opt.growth_budget = n;
        c.opt.truncation.max_ball = n;
        c.opt.lp.policy.max_support = std::min(c.opt.lp.policy.max_support, n);
    }
    if (!(c.opt.tol >= 0))
        throw SchemaError(f.where() + ": tolerance must be >= 0");

    const auto& hs = handlers();
    auto it = std::find_if(hs.begin(), hs.end(), [&](const auto& h) { return h.first == job.kind; });
    if (it == hs.end())
        throw SchemaError(f.where() + ": unknown experiment kind '" + job.kind + "'");
    try {
        job.run = it->second(f, c);
    } catch (const InvalidInput& e) {
        throw SchemaError(f.where() + ": " + e.what());
    }
    f.finish();
    return job;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& config, const std::filesystem::path& base_dir,
                       const RunOptions& options) {
    Fields top(config, "config");
    auto schema = top.str("schema");
    if (schema != kConfigSchema)
        throw SchemaError("config: schema must be \"" + std::string(kConfigSchema) + "\", got \"" + schema + "\"");
    RunConfig rc;
    if (top.has("out"))
        rc.out = top.str("out");
    top.has("description");
    const auto& ex = top.at("experiments");
    if (!ex.is_array())
        throw SchemaError("config: 'experiments' must be a list");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < ex.size(); ++i) {
        auto job = bind_experiment(ex[i], i, base_dir, options);
        if (!ids.insert(job.id).second)
            throw SchemaError("config: duplicate experiment id '" + job.id + "'");
        rc.jobs.push_back(std::move(job));
    }
    top.finish();
    return rc;
}

RunConfig load_config(const std::filesystem::path& path, const RunOptions& options) {
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot read config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j, path.parent_path(), options);
}

int RunResult::exit_code() const {
    bool rejected = false, failed = false, budget = false;
    for (const auto& r : results) {
        rejected = rejected || r.status == RunStatus::Rejected;
        failed = failed || r.report.verdict == Verdict::Fail;
        budget = budget || r.status == RunStatus::BudgetAbort || r.report.budget_exhausted;
    }
    if (rejected)
        return 2;
    if (failed)
        return 1;
    if (budget)
        return 3;
    return 0;
}

RunResult run_jobs(const RunConfig& config, const RunOptions& options) {
    RunResult out;
    out.results.resize(config.jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < config.jobs.size(); i = next++) {
            const Job& job = config.jobs[i];
            ExperimentResult& res = out.results[i];
            res.spec = job.spec;
            auto t0 = std::chrono::steady_clock::now();
            try {
                res.report = job.run();
                if (res.report.budget_exhausted)
                    res.status = RunStatus::BudgetAbort;
            } catch (const BudgetExceeded& e) {
                res.status = RunStatus::BudgetAbort;
                res.report = {};
                res.report.budget_exhausted = true;
                res.report.notes.push_back(std::string("budget exceeded: ") + e.what() + " (completed " +
                                           std::to_string(e.completed()) + " stages)");
            } catch (const InvalidInput& e) {
                res.status = RunStatus::Rejected;
                res.report = {};
                res.report.notes.push_back(std::string("input rejected: ") + e.what());
            } catch (const std::exception& e) {
                res.status = RunStatus::Rejected;
                res.report = {};
                res.report.notes.push_back(std::string("error: ") + e.what());
            }
            auto t1 = std::chrono::steady_clock::now();
            res.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            res.report.id = job.id;
            res.report.kind = job.kind;
            if (res.report.group.empty())
                res.report.group = job.spec.value("group", "");
        }
    };
    std::size_t n = std::max<std::size_t>(1, std::min(options.jobs, config.jobs.size()));
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < n; ++k)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    return out;
}

nlohmann::json report_document(const ExperimentResult& r) {
    nlohmann::json j = to_json(r.report);
    j["schema"] = kConfigSchema;
    j["status"] = to_string(r.status);
    j["config"] = r.spec;
    return j;
}

namespace {

std::string csv_number(double x) {
    if (!std::isfinite(x))
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    return nlohmann::json(x).dump();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"')
            q += '"';
        q += ch;
    }
    return q + "\"";
}

}  // namespace

std::string summary_csv(const RunResult& r) {
    std::ostringstream os;
    os << "experiment_id,kind,group,verdict,margin,lower,upper,wall_ms\n";
    for (const auto& e : r.results) {
        const auto& rep = e.report;
        std::string lower, upper;
        const Comparison* tight = nullptr;
        for (const auto& c : rep.comparisons)
            if (c.lhs != "precondition" && (!tight || c.margin < tight->margin))
                tight = &c;
        if (tight) {
            const auto& q = rep.quantity(tight->lhs);
            lower = csv_number(q.lower);
            upper = csv_number(q.upper);
        }
        std::ostringstream ms;
        ms.setf(std::ios::fixed);
        ms.precision(3);
        ms << e.wall_ms;
        std::string verdict = e.status == RunStatus::Completed ? to_string(rep.verdict) : to_string(e.status);
        os << csv_field(rep.id) << ',' << csv_field(rep.kind) << ',' << csv_field(rep.group) << ',' << verdict
           << ',' << csv_number(rep.margin) << ',' << lower << ',' << upper << ',' << ms.str() << '\n';
    }
    return os.str();
}

void write_outputs(const RunResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& e : r.results) {
        std::ofstream out(dir / (e.report.id + ".json"));
        out << report_document(e).dump(2) << '\n';
        if (!out)
            throw Error("cannot write report for " + e.report.id);
    }
    std::ofstream csv(dir / "summary.csv");
    csv << summary_csv(r);
    if (!csv)
        throw Error("cannot write summary.csv in " + dir.string());
}

std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag, const RunConfig& config) {
    if (flag)
        return *flag;
    if (const char* env = std::getenv("SPECRAD_LAB_OUT"); env && *env)
        return env;
    if (config.out)
        return *config.out;
    return "specrad-out";
}

std::vector<std::string> experiment_kinds() {
    std::vector<std::string> k;
    for (const auto& h : handlers())
        k.push_back(h.first);
    return k;
}

std::string catalog_listing() {
    std::ostringstream os;
    os << "groups:\n";
    for (const auto& name : catalog_names()) {
        const Group& g = catalog_group(name);
        os << "  " << name << "  generators:";
        const auto& gens = g.generators();
        for (std::size_t i = 0; i < g.default_generator_count() && i < gens.size(); ++i)
            os << ' ' << g.generator_letters()[i] << '=' << g.format(gens[i]);
        os << "  -- " << g.description() << '\n';
    }
    os << "experiment kinds:\n";
    for (const auto& k : experiment_kinds())
        os << "  " << k << '\n';
    return os.str();
}

}  // namespace specrad
