#include "fiap/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fiap {

using nlohmann::json;

double InitLaw::mean() const {
    switch (kind) {
        case Kind::constant:
            return value;
        case Kind::uniform:
            return 0.5 * (lo + hi);
        case Kind::trunc_exp: {
            // E[X | X <= cap] for X ~ Exp(rate)
            const double z = 1.0 - std::exp(-rate * cap);
            return 1.0 / rate - cap * std::exp(-rate * cap) / z;
        }
    }
    throw std::logic_error("unreachable InitLaw kind");
}

double InitLaw::sample(RngStream& rng) const {
    switch (kind) {
        case Kind::constant:
            return value;
        case Kind::uniform:
            return lo + (hi - lo) * rng.uniform01();
        case Kind::trunc_exp: {
            const double z = 1.0 - std::exp(-rate * cap);
            return -std::log1p(-rng.uniform01() * z) / rate;
        }
    }
    throw std::logic_error("unreachable InitLaw kind");
}

std::string builtin_name(BuiltinModel m) {
    switch (m) {
        case BuiltinModel::none:
            return "custom";
        case BuiltinModel::gl_excitatory:
            return "gl_excitatory";
        case BuiltinModel::gl_inhibitory:
            return "gl_inhibitory";
        case BuiltinModel::gordon_newell:
            return "gordon_newell";
    }
    throw std::logic_error("unreachable builtin");
}

namespace {

BuiltinModel builtin_from_name(const std::string& name) {
    if (name == "gl_excitatory") return BuiltinModel::gl_excitatory;
    if (name == "gl_inhibitory") return BuiltinModel::gl_inhibitory;
    if (name == "gordon_newell") return BuiltinModel::gordon_newell;
    throw std::invalid_argument("unknown builtin model: " + name);
}

bool near_integer(double v) {
    return std::abs(v - std::round(v)) < 1e-9;
}

InitLaw init_from_json(const json& j) {
    InitLaw law;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        law.kind = InitLaw::Kind::constant;
        law.value = j.at("value").get<double>();
    } else if (kind == "uniform") {
        law.kind = InitLaw::Kind::uniform;
        law.lo = j.at("lo").get<double>();
        law.hi = j.at("hi").get<double>();
        if (law.hi < law.lo) {
            throw std::invalid_argument("init uniform: hi < lo");
        }
    } else if (kind == "trunc_exp") {
        law.kind = InitLaw::Kind::trunc_exp;
        law.rate = j.at("rate").get<double>();
        law.cap = j.at("cap").get<double>();
        if (!(law.rate > 0.0) || !(law.cap > 0.0)) {
            throw std::invalid_argument("init trunc_exp: rate and cap must be > 0");
        }
    } else {
        throw std::invalid_argument("unknown init kind: " + kind);
    }
    return law;
}

json init_to_json(const InitLaw& law) {
    switch (law.kind) {
        case InitLaw::Kind::constant:
            return json{{"kind", "constant"}, {"value", law.value}};
        case InitLaw::Kind::uniform:
            return json{{"kind", "uniform"}, {"lo", law.lo}, {"hi", law.hi}};
        case InitLaw::Kind::trunc_exp:
            return json{{"kind", "trunc_exp"}, {"rate", law.rate}, {"cap", law.cap}};
    }
    throw std::logic_error("unreachable InitLaw kind");
}

}  // namespace

CFIAPSpec CFIAPSpec::gl(BuiltinModel which, int K, double mu, double r, double b,
                        double tau, double horizon, InitLaw init) {
    std::vector<std::vector<double>> matrix(
        static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(K), mu));
    return gl_matrix(which, K, std::move(matrix), r, b, tau, horizon, init);
}

CFIAPSpec CFIAPSpec::gl_matrix(BuiltinModel which, int K,
                               std::vector<std::vector<double>> mu, double r, double b,
                               double tau, double horizon, InitLaw init) {
    if (which != BuiltinModel::gl_excitatory && which != BuiltinModel::gl_inhibitory) {
        throw std::invalid_argument("gl_matrix: not a GL builtin");
    }
    if (K < 1) {
        throw std::invalid_argument("K must be >= 1");
    }
    if (!(r > 0.0)) {
        throw std::invalid_argument("GL reset r must be > 0");
    }
    if (!(b > 0.0)) {
        throw std::invalid_argument("GL drift target b must be > 0");
    }
    if (!(tau > 0.0)) {
        throw std::invalid_argument("GL tau must be > 0 (may be infinite)");
    }
    CFIAPSpec spec;
    spec.builtin_ = which;
    spec.K_ = K;
    spec.horizon_ = horizon;
    spec.r_ = r;
    spec.b_ = b;
    spec.tau_ = tau;
    spec.mu_ = std::move(mu);
    spec.h_bound_ = 0.0;
    for (const auto& row : spec.mu_) {
        if (row.size() != static_cast<std::size_t>(K)) {
            throw std::invalid_argument("mu matrix must be K x K");
        }
        for (double v : row) {
            if (which == BuiltinModel::gl_excitatory && v < 0.0) {
                throw std::invalid_argument("gl_excitatory requires mu >= 0");
            }
            spec.h_bound_ = std::max(spec.h_bound_, std::abs(v));
            spec.h_integer_ = spec.h_integer_ && near_integer(v);
            spec.h_signed_ = spec.h_signed_ || v < 0.0;
        }
    }
    spec.f_lipschitz_ = 1.0;
    spec.assumption1_ = false;  // sigma = b (or relaxation toward b) exceeds small lam
    spec.init_.assign(static_cast<std::size_t>(K), init);
    return spec;
}

CFIAPSpec CFIAPSpec::gordon_newell(int K, double horizon, InitLaw init) {
    if (K < 2) {
        throw std::invalid_argument("gordon_newell requires K >= 2");
    }
    CFIAPSpec spec;
    spec.builtin_ = BuiltinModel::gordon_newell;
    spec.K_ = K;
    spec.horizon_ = horizon;
    spec.h_bound_ = 1.0;
    spec.f_lipschitz_ = 1.0;
    spec.assumption1_ = true;  // g = lam - 1 <= lam, sigma = lam
    const auto k = static_cast<std::size_t>(K);
    spec.mu_.assign(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < K; ++i) {
        const int j = (i + 1) % K;  // node i aggregates departures of its successor
        spec.mu_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1.0;
    }
    spec.init_.assign(k, init);
    return spec;
}

CFIAPSpec CFIAPSpec::custom(int K, double horizon, CustomParts parts,
                            std::vector<InitLaw> init) {
    if (K < 1) {
        throw std::invalid_argument("K must be >= 1");
    }
    const auto k = static_cast<std::size_t>(K);
    if (parts.h.size() != k || parts.g.size() != k || parts.sigma.size() != k) {
        throw std::invalid_argument("custom parts must have K rows");
    }
    for (const auto& row : parts.h) {
        if (row.size() != k) {
            throw std::invalid_argument("custom h must be K x K");
        }
    }
    if (init.size() == 1) {
        init.assign(k, init[0]);
    }
    if (init.size() != k) {
        throw std::invalid_argument("init must have 1 or K entries");
    }
    CFIAPSpec spec;
    spec.K_ = K;
    spec.horizon_ = horizon;
    spec.h_bound_ = parts.h_bound;
    spec.f_lipschitz_ = parts.f_lipschitz;
    spec.init_ = std::move(init);
    for (const auto& row : parts.h) {
        for (const auto& e : row) {
            if (!e.is_constant()) {
                spec.h_constant_ = false;
                spec.h_integer_ = false;
                spec.h_signed_ = true;  // unknown sign over time; treat as signed
            } else {
                spec.h_integer_ = spec.h_integer_ && near_integer(e.constant_value());
                spec.h_signed_ = spec.h_signed_ || e.constant_value() < 0.0;
            }
        }
    }
    spec.parts_ = std::make_shared<const CustomParts>(std::move(parts));
    return spec;
}

double CFIAPSpec::h(int j, int i, double t) const {
    if (parts_) {
        return parts_->h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].eval1(t);
    }
    (void)t;
    return mu_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
}

double CFIAPSpec::f(double x) const {
    if (parts_) {
        return parts_->f.eval1(x);
    }
    if (builtin_ == BuiltinModel::gl_inhibitory) {
        return std::max(0.0, x);
    }
    return std::abs(x);
}

double CFIAPSpec::g(int i, double s, double lam) const {
    if (parts_) {
        return parts_->g[static_cast<std::size_t>(i)].eval2(s, lam);
    }
    (void)s;
    (void)i;
    if (builtin_ == BuiltinModel::gordon_newell) {
        return lam - 1.0;
    }
    return r_;
}

double CFIAPSpec::sigma(int i, double s, double lam) const {
    if (parts_) {
        return parts_->sigma[static_cast<std::size_t>(i)].eval2(s, lam);
    }
    (void)s;
    (void)i;
    if (builtin_ == BuiltinModel::gordon_newell) {
        return lam;
    }
    if (std::isinf(tau_)) {
        return lam;
    }
    return lam + (b_ - lam) / tau_;
}

DriftModel CFIAPSpec::drift(int i) const {
    DriftModel d;
    if (parts_) {
        const Expr& sig = parts_->sigma[static_cast<std::size_t>(i)];
        // Detect affine sigma(s, lam) = alpha + beta * lam by probing; the
        // grammar has no division so time-constant affine maps probe exactly.
        const double at0 = sig.eval2(0.0, 0.0);
        const double at1 = sig.eval2(0.0, 1.0);
        const double at2 = sig.eval2(0.0, 2.0);
        const double at_t = sig.eval2(1.0, 0.5);
        const double beta = at1 - at0;
        const bool affine = std::abs(at2 - (at0 + 2.0 * beta)) < 1e-12 &&
                            std::abs(at_t - (at0 + 0.5 * beta)) < 1e-12;
        if (affine) {
            d.affine = true;
            d.alpha = at0;
            d.beta = beta;
        } else {
            d.affine = false;
            d.sigma = [sig](double s, double lam) { return sig.eval2(s, lam); };
        }
        return d;
    }
    if (builtin_ == BuiltinModel::gordon_newell || std::isinf(tau_)) {
        d.alpha = 0.0;
        d.beta = 1.0;  // sigma = lam: constant between events
        return d;
    }
    d.alpha = b_ / tau_;
    d.beta = 1.0 - 1.0 / tau_;
    return d;
}

double CFIAPSpec::rate_bound(int i, double lam) const {
    if (parts_) {
        if (parts_->rate_bound) {
            return parts_->rate_bound->eval1(lam);
        }
        return std::max(lam, 0.0);
    }
    (void)i;
    if (builtin_ == BuiltinModel::gordon_newell) {
        return std::max(lam, 0.0);
    }
    if (std::isinf(tau_)) {
        return std::max(lam, 0.0);
    }
    // Drift relaxes toward b, so the path stays under max(lam, b).
    return std::max(std::max(lam, b_), 0.0);
}

double CFIAPSpec::gl_reset() const {
    if (builtin_ != BuiltinModel::gl_excitatory && builtin_ != BuiltinModel::gl_inhibitory) {
        throw std::logic_error("gl_reset: not a GL spec");
    }
    return r_;
}

double CFIAPSpec::gl_drift_target() const {
    if (builtin_ != BuiltinModel::gl_excitatory && builtin_ != BuiltinModel::gl_inhibitory) {
        throw std::logic_error("gl_drift_target: not a GL spec");
    }
    return b_;
}

double CFIAPSpec::gl_mu(int j, int i) const {
    if (builtin_ != BuiltinModel::gl_excitatory && builtin_ != BuiltinModel::gl_inhibitory) {
        throw std::logic_error("gl_mu: not a GL spec");
    }
    return mu_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
}

double CFIAPSpec::gl_tau() const {
    if (builtin_ != BuiltinModel::gl_excitatory && builtin_ != BuiltinModel::gl_inhibitory) {
        throw std::logic_error("gl_tau: not a GL spec");
    }
    return tau_;
}

CFIAPSpec CFIAPSpec::builtin(const std::string& name, const json& params, int K,
                             double horizon, InitLaw init) {
    const BuiltinModel which = builtin_from_name(name);
    if (which == BuiltinModel::gordon_newell) {
        return gordon_newell(K, horizon, init);
    }
    const double r = params.value("r", 1.0);
    const double b = params.value("b", 1.0);
    double tau = 1.0;
    if (params.contains("tau")) {
        if (params["tau"].is_string()) {
            if (params["tau"].get<std::string>() != "inf") {
                throw std::invalid_argument("tau must be a number or \"inf\"");
            }
            tau = std::numeric_limits<double>::infinity();
        } else {
            tau = params["tau"].get<double>();
        }
    }
    if (params.contains("mu") && params["mu"].is_array()) {
        auto mu = params["mu"].get<std::vector<std::vector<double>>>();
        return gl_matrix(which, K, std::move(mu), r, b, tau, horizon, init);
    }
    const double mu = params.value("mu", 1.0);
    return gl(which, K, mu, r, b, tau, horizon, init);
}

CFIAPSpec CFIAPSpec::from_json(const json& config) {
    const int K = config.at("K").get<int>();
    const double horizon = config.at("horizon").get<double>();

    std::vector<InitLaw> init;
    const json& init_json = config.at("init");
    if (init_json.is_array()) {
        for (const auto& entry : init_json) {
            init.push_back(init_from_json(entry));
        }
    } else {
        init.push_back(init_from_json(init_json));
    }

    if (config.contains("example")) {
        if (init.size() != 1) {
            throw std::invalid_argument("builtin models take a single init law");
        }
        return builtin(config["example"].get<std::string>(),
                       config.value("params", json::object()), K, horizon, init[0]);
    }
    if (!config.contains("custom")) {
        throw std::invalid_argument("model config needs \"example\" or \"custom\"");
    }
    const json& c = config["custom"];
    CustomParts parts;
    parts.h_bound = c.at("h_bound").get<double>();
    parts.f_lipschitz = c.value("f_lipschitz", 1.0);
    parts.f = Expr::parse(c.at("f").get<std::string>(), {"x"});
    const auto h_rows = c.at("h").get<std::vector<std::vector<std::string>>>();
    for (const auto& row : h_rows) {
        std::vector<Expr> exprs;
        for (const auto& cell : row) {
            exprs.push_back(Expr::parse(cell, {"t"}));
        }
        parts.h.push_back(std::move(exprs));
    }
    auto per_node = [K](const json& field) {
        std::vector<Expr> out;
        if (field.is_array()) {
            for (const auto& entry : field) {
                out.push_back(Expr::parse(entry.get<std::string>(), {"s", "lam"}));
            }
        } else {
            const Expr e = Expr::parse(field.get<std::string>(), {"s", "lam"});
            out.assign(static_cast<std::size_t>(K), e);
        }
        return out;
    };
    parts.g = per_node(c.at("g"));
    parts.sigma = per_node(c.at("sigma"));
    if (c.contains("rate_bound")) {
        parts.rate_bound = Expr::parse(c["rate_bound"].get<std::string>(), {"lam"});
    }
    return custom(K, horizon, std::move(parts), std::move(init));
}

json CFIAPSpec::to_json() const {
    json out;
    out["K"] = K_;
    out["horizon"] = horizon_;
    bool same_init = true;
    for (const auto& law : init_) {
        if (init_to_json(law) != init_to_json(init_[0])) {
            same_init = false;
            break;
        }
    }
    if (same_init) {
        out["init"] = init_to_json(init_[0]);
    } else {
        json arr = json::array();
        for (const auto& law : init_) {
            arr.push_back(init_to_json(law));
        }
        out["init"] = arr;
    }
    if (builtin_ != BuiltinModel::none) {
        out["example"] = builtin_name(builtin_);
        json params;
        if (builtin_ != BuiltinModel::gordon_newell) {
            params["mu"] = mu_;
            params["r"] = r_;
            params["b"] = b_;
            if (std::isinf(tau_)) {
                params["tau"] = "inf";
            } else {
                params["tau"] = tau_;
            }
        }
        out["params"] = params;
        return out;
    }
    json c;
    c["h_bound"] = parts_->h_bound;
    c["f_lipschitz"] = parts_->f_lipschitz;
    c["f"] = parts_->f.text();
    json h_rows = json::array();
    for (const auto& row : parts_->h) {
        json cells = json::array();
        for (const auto& e : row) {
            cells.push_back(e.text());
        }
        h_rows.push_back(cells);
    }
    c["h"] = h_rows;
    json g_arr = json::array();
    json s_arr = json::array();
    for (const auto& e : parts_->g) {
        g_arr.push_back(e.text());
    }
    for (const auto& e : parts_->sigma) {
        s_arr.push_back(e.text());
    }
    c["g"] = g_arr;
    c["sigma"] = s_arr;
    if (parts_->rate_bound) {
        c["rate_bound"] = parts_->rate_bound->text();
    }
    out["custom"] = c;
    return out;
}

bool ValidationReport::ok() const {
    for (const auto& f : findings) {
        if (f.level == Finding::Level::fail) {
            return false;
        }
    }
    return true;
}

const Finding* ValidationReport::find(const std::string& check) const {
    for (const auto& f : findings) {
        if (f.check == check) {
            return &f;
        }
    }
    return nullptr;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& f : findings) {
        const char* level = f.level == Finding::Level::pass  ? "pass"
                            : f.level == Finding::Level::warn ? "warn"
                                                              : "fail";
        os << level << " " << f.check << ": " << f.message << "\n";
    }
    return os.str();
}

ValidationReport validate(const CFIAPSpec& spec, std::uint64_t check_seed) {
    ValidationReport report;
    auto add = [&report](Finding::Level level, std::string check, std::string message) {
        report.findings.push_back({level, std::move(check), std::move(message)});
    };
    RngStream rng(check_seed, {0, 0, stream_purpose::kStep});
    const double T = spec.horizon();
    const int grid = 1000;

    // |h| <= H on a time grid.
    {
        double worst = 0.0;
        bool any_negative = false;
        for (int j = 0; j < spec.K(); ++j) {
            for (int i = 0; i < spec.K(); ++i) {
                if (i == j) {
                    continue;  // diagonal unused: sums run over j != i
                }
                for (int k = 0; k <= grid; ++k) {
                    const double t = T * k / grid;
                    const double v = spec.h(j, i, t);
                    worst = std::max(worst, std::abs(v));
                    any_negative = any_negative || v < 0.0;
                }
            }
        }
        if (worst <= spec.h_bound() + 1e-9) {
            add(Finding::Level::pass, "h_bound",
                "max |h| on grid = " + std::to_string(worst) + " within declared bound");
        } else {
            add(Finding::Level::fail, "h_bound",
                "max |h| on grid = " + std::to_string(worst) + " exceeds declared bound " +
                    std::to_string(spec.h_bound()));
        }
        if (any_negative) {
            add(Finding::Level::warn, "h_signed",
                "signed interaction weights: event rate is clamped at zero while the "
                "state variable evolves unclamped");
        }
    }

    // f(0) = 0, f >= 0, Lipschitz spot check.
    if (std::abs(spec.f(0.0)) <= 1e-12) {
        add(Finding::Level::pass, "f_zero", "f(0) = 0");
    } else {
        add(Finding::Level::fail, "f_zero",
            "f(0) = " + std::to_string(spec.f(0.0)) + " != 0");
    }
    {
        bool nonneg = true;
        bool lipschitz = true;
        double worst_ratio = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const double x = (rng.uniform01() - 0.5) * 200.0;
            const double y = (rng.uniform01() - 0.5) * 200.0;
            const double fx = spec.f(x);
            const double fy = spec.f(y);
            nonneg = nonneg && fx >= 0.0 && fy >= 0.0;
            if (x != y) {
                const double ratio = std::abs(fx - fy) / std::abs(x - y);
                worst_ratio = std::max(worst_ratio, ratio);
                lipschitz = lipschitz && ratio <= spec.f_lipschitz() * (1.0 + 1e-9);
            }
        }
        add(nonneg ? Finding::Level::pass : Finding::Level::fail, "f_nonneg",
            nonneg ? "f >= 0 on sampled points" : "f takes negative values");
        add(lipschitz ? Finding::Level::pass : Finding::Level::fail, "f_lipschitz",
            "worst sampled slope " + std::to_string(worst_ratio) + " vs declared " +
                std::to_string(spec.f_lipschitz()));
    }

    // g, sigma codomain and the monotone-drift assumption, on an (s, lam) grid.
    {
        bool g_nonneg = true;
        bool sigma_nonneg = true;
        bool a1_g = true;
        bool a1_sigma = true;
        for (int i = 0; i < spec.K(); ++i) {
            for (int ks = 0; ks <= 20; ++ks) {
                const double s = T * ks / 20;
                for (int kl = 0; kl <= 50; ++kl) {
                    const double lam = 0.1 * kl * std::max(1.0, spec.h_bound()) * 5.0;
                    const double gv = spec.g(i, s, lam);
                    const double sv = spec.sigma(i, s, lam);
                    g_nonneg = g_nonneg && gv >= 0.0;
                    sigma_nonneg = sigma_nonneg && sv >= 0.0;
                    a1_g = a1_g && gv <= lam + 1e-12;
                    a1_sigma = a1_sigma && sv <= lam + 1e-12;
                }
            }
        }
        if (g_nonneg) {
            add(Finding::Level::pass, "g_nonneg", "g >= 0 on grid");
        } else if (spec.builtin_kind() == BuiltinModel::gordon_newell) {
            add(Finding::Level::warn, "g_nonneg",
                "g(t, lam) = lam - 1 maps below zero on the grid; it is only applied "
                "at event times, where lam > 0 almost surely");
        } else {
            add(Finding::Level::warn, "g_nonneg",
                "fragmentation maps to negative intensity at low states; it is only "
                "applied at event times");
        }
        add(sigma_nonneg ? Finding::Level::pass : Finding::Level::warn, "sigma_nonneg",
            sigma_nonneg ? "sigma >= 0 on grid" : "sigma takes negative values on grid");
        if (a1_g && a1_sigma) {
            add(Finding::Level::pass, "assumption1",
                "g and sigma stay below the identity: intensity is nonincreasing "
                "between aggregations");
        } else {
            add(Finding::Level::warn, "assumption1",
                std::string(a1_g ? "sigma" : (a1_sigma ? "g" : "g and sigma")) +
                    " exceed the identity on the grid; rate claims are only certified "
                    "on compliant models, simulation needs a window-local dominating "
                    "bound");
        }
    }

    // Initial laws: every supported family has finite exponential moments.
    add(Finding::Level::pass, "init_moments",
        "initial law family has finite exponential moments (bounded or truncated "
        "support)");

    return report;
}

}  // namespace fiap
