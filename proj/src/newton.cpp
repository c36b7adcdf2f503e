#include "pocan/newton.hpp"

#include "pocan/errors.hpp"
#include "pocan/exact_linalg.hpp"
#include "pocan/graph.hpp"
#include "pocan/reach.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>

namespace pocan {

// ---------------------------------------------------------------------------
// System construction

std::optional<std::uint32_t> QuadraticSystem::var(StateId p, StateId q) const {
    if (p >= num_states || q >= num_states) return std::nullopt;
    auto v = index_[p * num_states + q];
    if (v < 0) return std::nullopt;
    return static_cast<std::uint32_t>(v);
}

double QuadraticSystem::rhs(std::size_t eq, const std::vector<double>& x) const {
    const auto& e = equations[eq];
    double acc = e.constant_d;
    for (const auto& t : e.linear) acc += t.coef_d * x[t.var];
    for (const auto& t : e.bilinear) acc += t.coef_d * x[t.lhs] * x[t.rhs];
    return acc;
}

Rational QuadraticSystem::rhs(std::size_t eq, const std::vector<Rational>& x) const {
    const auto& e = equations[eq];
    Rational acc = e.constant;
    for (const auto& t : e.linear) acc += t.coef * x[t.var];
    for (const auto& t : e.bilinear) acc += t.coef * x[t.lhs] * x[t.rhs];
    return acc;
}

QuadraticSystem build_term_system(const Poc& m, const std::vector<std::vector<bool>>& tpos) {
    const auto n = m.num_states();
    QuadraticSystem sys;
    sys.num_states = n;
    sys.index_.assign(n * n, -1);
    for (StateId p = 0; p < n; ++p) {
        for (StateId q = 0; q < n; ++q) {
            if (tpos[p][q]) {
                sys.index_[p * n + q] = static_cast<std::int32_t>(sys.variables.size());
                sys.variables.emplace_back(p, q);
            }
        }
    }

    for (const auto& [p, q] : sys.variables) {
        QuadraticSystem::Equation eq;
        std::map<std::uint32_t, Rational> linear;
        std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> bilinear;
        for (auto i : m.pos_rules_from(p)) {
            const auto& r = m.pos_rules()[i];
            if (r.delta == -1) {
                if (r.dst == q) eq.constant += r.prob;
            } else if (r.delta == 0) {
                if (auto v = sys.var(r.dst, q)) linear[*v] += r.prob;
            } else {
                for (StateId mid = 0; mid < n; ++mid) {
                    auto a = sys.var(r.dst, mid);
                    auto b = sys.var(mid, q);
                    if (a && b) bilinear[{std::min(*a, *b), std::max(*a, *b)}] += r.prob;
                }
            }
        }
        eq.constant_d = eq.constant.get_d();
        for (auto& [v, c] : linear) eq.linear.push_back({v, c, c.get_d()});
        for (auto& [vv, c] : bilinear) eq.bilinear.push_back({vv.first, vv.second, c, c.get_d()});
        sys.equations.push_back(std::move(eq));
    }

    Adjacency deps(sys.variables.size());
    for (std::uint32_t i = 0; i < sys.equations.size(); ++i) {
        for (const auto& t : sys.equations[i].linear) deps[i].push_back(t.var);
        for (const auto& t : sys.equations[i].bilinear) {
            deps[i].push_back(t.lhs);
            deps[i].push_back(t.rhs);
        }
        std::sort(deps[i].begin(), deps[i].end());
        deps[i].erase(std::unique(deps[i].begin(), deps[i].end()), deps[i].end());
    }
    // Tarjan lists sinks first, i.e. blocks whose dependencies are all earlier.
    sys.dependency_sccs = scc_decompose(deps).components;
    return sys;
}

const char* to_string(Backend b) {
    switch (b) {
        case Backend::Auto: return "auto";
        case Backend::Float64: return "float64";
        case Backend::ExactRational: return "exact_rational";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Residuals

Rational residual(const QuadraticSystem& sys, const std::vector<Rational>& vals) {
    Rational worst;
    for (std::size_t i = 0; i < sys.equations.size(); ++i) {
        Rational d = abs(Rational(sys.rhs(i, vals) - vals[i]));
        if (d > worst) worst = d;
    }
    return worst;
}

double residual(const QuadraticSystem& sys, const std::vector<double>& vals) {
    double worst = 0.0;
    for (std::size_t i = 0; i < sys.equations.size(); ++i) {
        worst = std::max(worst, std::abs(sys.rhs(i, vals) - vals[i]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Solver

double TermSolution::value(StateId p, StateId q) const {
    auto v = index_.empty() ? -1 : index_[p * num_states + q];
    return v < 0 ? 0.0 : values[static_cast<std::size_t>(v)];
}

Rational TermSolution::exact_value(StateId p, StateId q) const {
    auto v = index_.empty() ? -1 : index_[p * num_states + q];
    return v < 0 ? Rational(0) : exact[static_cast<std::size_t>(v)];
}

bool TermSolution::positive(StateId p, StateId q) const {
    return !index_.empty() && index_[p * num_states + q] >= 0;
}

Rational exact_backend_threshold() {
    Rational t(1);
    mpq_div_2exp(t.get_mpq_t(), t.get_mpq_t(), 40);
    return t;
}

namespace {

constexpr double float_noise_floor = 64 * DBL_EPSILON;

std::size_t iteration_cap(std::size_t num_states, const Rational& eps) {
    double q3 = std::pow(static_cast<double>(num_states), 3.0);
    double bits = std::max(1.0, -std::log2(eps.get_d() > 0 ? eps.get_d() : 1e-300));
    if (eps.get_d() == 0.0) bits = static_cast<double>(-floor_log2(eps));
    return static_cast<std::size_t>(std::max(64.0, 64.0 * q3 * bits));
}

// Jacobian entry contributions of equation i restricted to the block.
template <typename Scalar, typename Fill>
void jacobian_row(const QuadraticSystem& sys, std::uint32_t eq, const std::vector<Scalar>& x, Fill&& fill) {
    const auto& e = sys.equations[eq];
    for (const auto& t : e.linear) {
        if constexpr (std::is_same_v<Scalar, double>) fill(t.var, Scalar(t.coef_d));
        else fill(t.var, Scalar(t.coef));
    }
    for (const auto& t : e.bilinear) {
        if constexpr (std::is_same_v<Scalar, double>) {
            fill(t.lhs, t.coef_d * x[t.rhs]);
            fill(t.rhs, t.coef_d * x[t.lhs]);
        } else {
            fill(t.lhs, Scalar(t.coef * x[t.rhs]));
            fill(t.rhs, Scalar(t.coef * x[t.lhs]));
        }
    }
}

struct BlockStats {
    std::size_t iterations = 0;
};

void solve_block_float(const QuadraticSystem& sys, const std::vector<std::uint32_t>& block, std::vector<double>& x,
                       double eps, std::size_t cap, BlockStats& stats) {
    const auto k = block.size();
    std::vector<int> local(sys.variables.size(), -1);
    for (std::size_t i = 0; i < k; ++i) local[block[i]] = static_cast<int>(i);

    for (std::size_t iter = 0;; ++iter) {
        if (iter >= cap) {
            std::vector<double> r(k);
            double worst = 0;
            for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, std::abs(sys.rhs(block[i], x) - x[block[i]]));
            throw ConvergenceError("Newton iteration cap exceeded (residual " + std::to_string(worst) + ")", worst);
        }
        ++stats.iterations;
        Eigen::MatrixXd jm = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        Eigen::VectorXd f(static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < k; ++i) {
            f(static_cast<Eigen::Index>(i)) = sys.rhs(block[i], x) - x[block[i]];
            jacobian_row(sys, block[i], x, [&](std::uint32_t var, double d) {
                if (local[var] >= 0) jm(static_cast<Eigen::Index>(i), local[var]) -= d;
            });
        }
        std::vector<double> next(k);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jm);
        Eigen::VectorXd delta = lu.solve(f);
        bool newton_ok = lu.rcond() > 1e-14 && delta.allFinite();
        for (std::size_t i = 0; i < k; ++i) {
            double cur = x[block[i]];
            double cand = newton_ok ? cur + delta(static_cast<Eigen::Index>(i)) : cur + f(static_cast<Eigen::Index>(i));
            next[i] = std::clamp(cand, cur, 1.0);
        }
        double change = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double d = next[i] - x[block[i]];
            if (d != 0.0) change = std::max(change, d / next[i]);
            x[block[i]] = next[i];
        }
        double res = 0.0;
        double smallest = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            res = std::max(res, std::abs(sys.rhs(block[i], x) - x[block[i]]));
            smallest = std::min(smallest, x[block[i]]);
        }
        bool small_change = change < eps / 4;
        bool small_residual = res <= eps / 4 * smallest || res <= float_noise_floor;
        if (small_change && small_residual) return;
    }
}

// Solves (I - J) delta = r to high relative accuracy: double LU plus
// iterative refinement against exact rational residuals. Returns nullopt if
// the refinement does not contract.
std::optional<std::vector<Rational>> refine_solve(const std::vector<std::vector<Rational>>& mat,
                                                  const std::vector<Rational>& r, unsigned bits,
                                                  Rational& error_bound) {
    const auto k = r.size();
    Eigen::MatrixXd md(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) md(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mat[i][j].get_d();
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(md);
    if (!(lu.rcond() > 1e-13)) return std::nullopt;

    Rational target(1);
    mpq_div_2exp(target.get_mpq_t(), target.get_mpq_t(), bits + 16);

    std::vector<Rational> delta(k);
    std::vector<Rational> res = r;
    Rational prev_norm;
    for (int round = 0; round < 64; ++round) {
        Rational norm;
        for (const auto& v : res) norm = std::max(norm, abs(v));
        Rational scale;
        for (const auto& v : delta) scale = std::max(scale, abs(v));
        if (norm == 0 || (scale > 0 && norm <= target * scale)) {
            // Next correction bounds the remaining error (up to the condition estimate).
            Eigen::VectorXd rd(static_cast<Eigen::Index>(k));
            for (std::size_t i = 0; i < k; ++i) rd(static_cast<Eigen::Index>(i)) = res[i].get_d();
            Eigen::VectorXd c = lu.solve(rd);
            error_bound = from_double(4.0 * c.cwiseAbs().maxCoeff() + 0.0);
            return delta;
        }
        if (round > 0 && norm >= prev_norm) return std::nullopt;
        prev_norm = norm;
        // Scale the residual into double range before the float solve.
        long shift = -floor_log2(norm);
        Eigen::VectorXd rd(static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < k; ++i) {
            Rational scaled = res[i];
            if (shift >= 0) mpq_mul_2exp(scaled.get_mpq_t(), scaled.get_mpq_t(), static_cast<unsigned long>(shift));
            else mpq_div_2exp(scaled.get_mpq_t(), scaled.get_mpq_t(), static_cast<unsigned long>(-shift));
            rd(static_cast<Eigen::Index>(i)) = scaled.get_d();
        }
        Eigen::VectorXd c = lu.solve(rd);
        if (!c.allFinite()) return std::nullopt;
        for (std::size_t i = 0; i < k; ++i) {
            Rational ci = from_double(c(static_cast<Eigen::Index>(i)));
            if (shift >= 0) mpq_div_2exp(ci.get_mpq_t(), ci.get_mpq_t(), static_cast<unsigned long>(shift));
            else mpq_mul_2exp(ci.get_mpq_t(), ci.get_mpq_t(), static_cast<unsigned long>(-shift));
            delta[i] += ci;
        }
        for (std::size_t i = 0; i < k; ++i) {
            Rational acc = r[i];
            for (std::size_t j = 0; j < k; ++j) {
                if (sgn(mat[i][j]) != 0) acc -= mat[i][j] * delta[j];
            }
            res[i] = acc;
        }
    }
    return std::nullopt;
}

void solve_block_exact(const QuadraticSystem& sys, const std::vector<std::uint32_t>& block, std::vector<Rational>& x,
                       const Rational& eps, unsigned bits, std::size_t cap, BlockStats& stats) {
    const auto k = block.size();
    std::vector<int> local(sys.variables.size(), -1);
    for (std::size_t i = 0; i < k; ++i) local[block[i]] = static_cast<int>(i);
    Rational grid(1);
    mpq_div_2exp(grid.get_mpq_t(), grid.get_mpq_t(), bits);
    const Rational noise_floor = grid * 65536;
    const Rational quarter_eps = eps / 4;

    for (std::size_t iter = 0;; ++iter) {
        if (iter >= cap) throw ConvergenceError("exact Newton iteration cap exceeded", 0.0);
        ++stats.iterations;
        std::vector<std::vector<Rational>> mat(k, std::vector<Rational>(k));
        std::vector<Rational> f(k);
        for (std::size_t i = 0; i < k; ++i) {
            mat[i][i] = 1;
            f[i] = sys.rhs(block[i], x) - x[block[i]];
            jacobian_row(sys, block[i], x, [&](std::uint32_t var, const Rational& d) {
                if (local[var] >= 0) mat[i][static_cast<std::size_t>(local[var])] -= d;
            });
        }

        std::vector<Rational> next(k);
        Rational err;
        auto delta = refine_solve(mat, f, bits, err);
        if (!delta && k <= 32) {
            RatMatrix dense(k, k);
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) dense(i, j) = mat[i][j];
            }
            delta = solve_exact(std::move(dense), f);
            err = 0;
        }
        for (std::size_t i = 0; i < k; ++i) {
            const auto& cur = x[block[i]];
            Rational cand = delta ? Rational(cur + (*delta)[i] - err) : Rational(cur + f[i]);
            cand = round_down_dyadic(cand, bits);
            if (cand < cur) cand = cur;
            if (cand > 1) cand = 1;
            next[i] = cand;
        }
        Rational change;
        for (std::size_t i = 0; i < k; ++i) {
            Rational d = next[i] - x[block[i]];
            if (sgn(d) != 0) change = std::max(change, Rational(d / next[i]));
            x[block[i]] = next[i];
        }
        Rational res;
        Rational smallest(1);
        for (std::size_t i = 0; i < k; ++i) {
            res = std::max(res, abs(Rational(sys.rhs(block[i], x) - x[block[i]])));
            smallest = std::min(smallest, x[block[i]]);
        }
        bool small_change = change < quarter_eps;
        bool small_residual = res <= quarter_eps * smallest || res <= noise_floor;
        if (small_change && small_residual) return;
    }
}

}  // namespace

TermSolution solve_termination(const Poc& m, const QuadraticSystem& sys, const Rational& eps,
                               const NewtonOptions& options) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("solve_termination: eps must lie in (0,1)");
    Backend backend = options.backend;
    if (backend == Backend::Auto) backend = eps < exact_backend_threshold() ? Backend::ExactRational : Backend::Float64;
    if (backend == Backend::Float64 && eps < exact_backend_threshold() / 16) {
        throw PrecisionError("relative error " + std::to_string(eps.get_d()) + " is below what FLOAT64 can deliver");
    }
    Rational grid_floor(1);
    mpq_div_2exp(grid_floor.get_mpq_t(), grid_floor.get_mpq_t(), options.grid_bits > 64 ? options.grid_bits - 64 : 1);
    if (backend == Backend::ExactRational && eps < grid_floor) {
        throw PrecisionError("relative error below 2^-" + std::to_string(options.grid_bits - 64) +
                             " exceeds the exact backend grid");
    }

    TermSolution out;
    out.num_states = m.num_states();
    out.pairs = sys.variables;
    out.rel_err = eps;
    out.backend = backend;
    out.index_.assign(m.num_states() * m.num_states(), -1);
    for (std::size_t i = 0; i < sys.variables.size(); ++i) {
        const auto& [p, q] = sys.variables[i];
        out.index_[p * m.num_states() + q] = static_cast<std::int32_t>(i);
    }

    const auto cap = iteration_cap(m.num_states(), eps);
    BlockStats stats;
    if (backend == Backend::Float64) {
        std::vector<double> x(sys.variables.size(), 0.0);
        for (const auto& block : sys.dependency_sccs) solve_block_float(sys, block, x, eps.get_d(), cap, stats);
        out.values = x;
        out.exact.reserve(x.size());
        for (double v : x) out.exact.push_back(from_double(v));
    } else {
        std::vector<Rational> x(sys.variables.size());
        for (const auto& block : sys.dependency_sccs) solve_block_exact(sys, block, x, eps, options.grid_bits, cap, stats);
        out.exact = x;
        out.values.reserve(x.size());
        for (const auto& v : x) out.values.push_back(v.get_d());
    }
    out.iterations = stats.iterations;
    out.residual = residual(sys, out.exact).get_d();
    return out;
}

TermSolution solve_termination(const Poc& m, const Rational& eps, const NewtonOptions& options) {
    auto sys = build_term_system(m, positive_pairs(m));
    return solve_termination(m, sys, eps, options);
}

}  // namespace pocan
