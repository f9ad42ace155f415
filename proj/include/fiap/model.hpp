#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fiap/expr.hpp"
#include "fiap/point_process.hpp"
#include "fiap/rng.hpp"

namespace fiap {

// Initial-intensity law; all supported families have finite exponential
// moments (bounded support or truncated tail).
struct InitLaw {
    enum class Kind { constant, uniform, trunc_exp };
    Kind kind = Kind::constant;
    double value = 1.0;  // constant
    double lo = 0.0;     // uniform
    double hi = 1.0;
    double rate = 1.0;  // trunc_exp: Exp(rate) conditioned on <= cap
    double cap = 10.0;

    double mean() const;
    double sample(RngStream& rng) const;
};

enum class BuiltinModel { none, gl_excitatory, gl_inhibitory, gordon_newell };

std::string builtin_name(BuiltinModel m);

// Declarative network model: K nodes, interaction weights h[j][i](t) bounded
// by h_bound, aggregation f, per-node fragmentation g and drift map sigma,
// per-node initial law, and horizon.
class CFIAPSpec {
  public:
    // Galves-Löcherbach builders. mu is the interaction weight used for every
    // ordered pair; r the reset value, b the drift target, tau the relaxation
    // time (infinity disables drift). The inhibitory variant takes
    // f(x) = max(0, x) so signed aggregates cannot push the rate term
    // negative.
    static CFIAPSpec gl(BuiltinModel which, int K, double mu, double r, double b,
                        double tau, double horizon, InitLaw init);
    static CFIAPSpec gl_matrix(BuiltinModel which, int K,
                               std::vector<std::vector<double>> mu, double r, double b,
                               double tau, double horizon, InitLaw init);
    // Closed cyclic network: node i served at rate lam_i, departures decrement
    // the state and feed the cyclic successor's predecessor wiring
    // h[j][i] = 1 iff j == (i+1) mod K.
    static CFIAPSpec gordon_newell(int K, double horizon, InitLaw init);
    static CFIAPSpec builtin(const std::string& name, const nlohmann::json& params,
                             int K, double horizon, InitLaw init);

    struct CustomParts {
        std::vector<std::vector<Expr>> h;  // h[j][i], vars: t
        double h_bound = 0.0;
        Expr f;  // vars: x
        double f_lipschitz = 1.0;
        std::vector<Expr> g;      // per node, vars: s, lam
        std::vector<Expr> sigma;  // per node, vars: s, lam
        std::optional<Expr> rate_bound;  // vars: lam
    };
    static CFIAPSpec custom(int K, double horizon, CustomParts parts,
                            std::vector<InitLaw> init);

    static CFIAPSpec from_json(const nlohmann::json& config);
    nlohmann::json to_json() const;

    int K() const { return K_; }
    double horizon() const { return horizon_; }
    double h_bound() const { return h_bound_; }
    double f_lipschitz() const { return f_lipschitz_; }
    BuiltinModel builtin_kind() const { return builtin_; }
    const InitLaw& init(int i) const { return init_[static_cast<std::size_t>(i)]; }

    double h(int j, int i, double t) const;
    bool h_constant() const { return h_constant_; }
    // True when every weight is a constant integer; enables exact integer
    // supports for arrival-count distributions.
    bool h_integer() const { return h_integer_; }
    bool h_signed() const { return h_signed_; }

    double f(double x) const;
    double g(int i, double s, double lam) const;
    double sigma(int i, double s, double lam) const;

    DriftModel drift(int i) const;
    // Dominating rate for the drift-only intensity path started at lam; must
    // bound max(intensity, 0) until the node's next state change.
    double rate_bound(int i, double lam) const;
    bool assumption1_declared() const { return assumption1_; }

    // GL parameter access (throws unless a GL builtin).
    double gl_reset() const;
    double gl_drift_target() const;
    double gl_mu(int j, int i) const;
    double gl_tau() const;

  private:
    CFIAPSpec() = default;

    int K_ = 0;
    double horizon_ = 0.0;
    double h_bound_ = 0.0;
    double f_lipschitz_ = 1.0;
    bool h_constant_ = true;
    bool h_integer_ = true;
    bool h_signed_ = false;
    bool assumption1_ = false;
    BuiltinModel builtin_ = BuiltinModel::none;

    // Builtin parameters.
    std::vector<std::vector<double>> mu_;
    double r_ = 1.0;
    double b_ = 1.0;
    double tau_ = 1.0;

    std::shared_ptr<const CustomParts> parts_;
    std::vector<InitLaw> init_;
};

struct Finding {
    enum class Level { pass, warn, fail };
    Level level;
    std::string check;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const;  // no fail-level findings
    const Finding* find(const std::string& check) const;
    std::string to_string() const;
};

// Grid/spot checks of the declared bounds and standing assumptions. Pure and
// deterministic given (spec, check_seed). Violations of the monotone-drift
// assumption are warnings: the canonical examples violate it.
ValidationReport validate(const CFIAPSpec& spec, std::uint64_t check_seed = 0);

}  // namespace fiap
