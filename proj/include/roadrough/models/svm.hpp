#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "roadrough/models/model.hpp"

namespace roadrough::models {

inline double rbf_kernel(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, double gamma)
{
    return std::exp(-gamma * (a - b).squaredNorm());
}

inline Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double gamma)
{
    Eigen::MatrixXd K(A.rows(), B.rows());
    for (Eigen::Index j = 0; j < B.rows(); ++j)
        for (Eigen::Index i = 0; i < A.rows(); ++i) K(i, j) = std::exp(-gamma * (A.row(i) - B.row(j)).squaredNorm());
    return K;
}

/// Box-constrained dual
///     min 1/2 b'Qb + p'b   s.t.  s'b = 0,  0 <= b <= C,  Q_tu = s_t s_u K(t mod n, u mod n)
/// solved by two-variable SMO with second-order working-set selection.
/// The problem has l = n (classification) or l = 2n (regression) variables.
struct SmoProblem {
    const Eigen::MatrixXd* K = nullptr; // n x n kernel
    std::vector<double> s;              // +-1, size l
    std::vector<double> p;              // linear term, size l
    double C = 1.0;
    double tol = 1e-3;
    std::size_t max_iter = 10000000;
};

struct SmoSolution {
    std::vector<double> beta;
    double rho = 0.0;       // decision = sum_t s_t beta_t K(t, x) - rho
    double objective = 0.0; // dual objective at beta
    double violation = 0.0; // final max KKT violation
    std::size_t iterations = 0;
};

inline SmoSolution smo_solve(const SmoProblem& pr)
{
    const Eigen::MatrixXd& K = *pr.K;
    const std::size_t n = static_cast<std::size_t>(K.rows());
    const std::size_t l = pr.s.size();
    detail::require(pr.p.size() == l && (l == n || l == 2 * n), "smo: inconsistent problem size");
    const double C = pr.C;
    auto kij = [&](std::size_t i, std::size_t j) {
        return K(static_cast<Eigen::Index>(i % n), static_cast<Eigen::Index>(j % n));
    };
    const auto& s = pr.s;
    std::vector<double> a(l, 0.0);
    std::vector<double> G = pr.p;
    auto up = [&](std::size_t t) { return s[t] > 0 ? a[t] < C : a[t] > 0; };
    auto low = [&](std::size_t t) { return s[t] > 0 ? a[t] > 0 : a[t] < C; };
    constexpr double kTau = 1e-12;
    const Eigen::VectorXd diag = K.diagonal();

    SmoSolution out;
    for (out.iterations = 0;; ++out.iterations) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = l;
        for (std::size_t t = 0; t < l; ++t)
            if (up(t) && -s[t] * G[t] > gmax) {
                gmax = -s[t] * G[t];
                i = t;
            }
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::size_t j = l;
        const double* Ki = i < l ? K.col(static_cast<Eigen::Index>(i % n)).data() : nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < l; ++t) {
            if (!low(t)) continue;
            gmax2 = std::max(gmax2, s[t] * G[t]);
            if (i == l) continue;
            const double b = gmax + s[t] * G[t];
            if (b <= 0) continue;
            double quad = diag[i % n] + diag[t % n] - 2.0 * Ki[t % n];
            if (quad <= 0) quad = kTau;
            const double obj = -(b * b) / quad;
            if (obj < best) {
                best = obj;
                j = t;
            }
        }
        out.violation = gmax + gmax2;
        if (out.violation < pr.tol || j == l || i == l) break;
        if (out.iterations >= pr.max_iter) {
            std::ostringstream os;
            os << "svm: SMO did not converge in " << pr.max_iter << " iterations (max KKT violation "
               << out.violation << ")";
            throw ConvergenceError(os.str());
        }

        const double ai_old = a[i];
        const double aj_old = a[j];
        const double qij = s[i] * s[j] * kij(i, j);
        if (s[i] != s[j]) {
            double quad = kij(i, i) + kij(j, j) + 2.0 * qij;
            if (quad <= 0) quad = kTau;
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0) {
                if (a[j] < 0) { a[j] = 0; a[i] = diff; }
            } else {
                if (a[i] < 0) { a[i] = 0; a[j] = -diff; }
            }
            if (diff > 0) {
                if (a[i] > C) { a[i] = C; a[j] = C - diff; }
            } else {
                if (a[j] > C) { a[j] = C; a[i] = C + diff; }
            }
        } else {
            double quad = kij(i, i) + kij(j, j) - 2.0 * qij;
            if (quad <= 0) quad = kTau;
            const double delta = (G[i] - G[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > C) {
                if (a[i] > C) { a[i] = C; a[j] = sum - C; }
            } else {
                if (a[j] < 0) { a[j] = 0; a[i] = sum; }
            }
            if (sum > C) {
                if (a[j] > C) { a[j] = C; a[i] = sum - C; }
            } else {
                if (a[i] < 0) { a[i] = 0; a[j] = sum; }
            }
        }
        const double di = (a[i] - ai_old) * s[i];
        const double dj = (a[j] - aj_old) * s[j];
        const double* Kin = K.col(static_cast<Eigen::Index>(i % n)).data();
        const double* Kjn = K.col(static_cast<Eigen::Index>(j % n)).data();
        for (std::size_t t = 0; t < n; ++t) {
            const double g = Kin[t] * di + Kjn[t] * dj;
            G[t] += s[t] * g;
            if (l > n) G[n + t] += s[n + t] * g;
        }
    }

    // Offset from free variables, else the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < l; ++t) {
        const double yg = s[t] * G[t];
        if (a[t] >= C) {
            if (s[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (a[t] <= 0) {
            if (s[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    out.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    for (std::size_t t = 0; t < l; ++t) out.objective += 0.5 * a[t] * (G[t] + pr.p[t]);
    out.beta = std::move(a);
    return out;
}

/// RBF-kernel support vector machine: epsilon-SVR for regression, one-vs-rest
/// C-SVC for classification (argmax of decision values).
/// Hyperparams: C, gamma; epsilon (regression, default 0.1).
class SupportVectorMachine : public Model {
public:
    SupportVectorMachine(Task task, Hyperparams hp = {}) : Model(task, std::move(hp)) {}

    std::string family() const override { return "svm"; }

    /// Decision values, rows x machines (1 machine for regression).
    Eigen::MatrixXd decision_function(const Eigen::MatrixXd& X) const
    {
        const Eigen::MatrixXd K = rbf_gram(X, sv_, gamma_);
        Eigen::MatrixXd D = K * coef_;
        for (Eigen::Index m = 0; m < D.cols(); ++m) D.col(m).array() -= rho_(m);
        return D;
    }

    /// Per-machine dual objective and iteration count from the last fit.
    const std::vector<SmoSolution>& solutions() const { return solutions_; }
    const Eigen::MatrixXd& dual_coef() const { return coef_; }
    const Eigen::MatrixXd& support_vectors() const { return sv_; }

protected:
    void do_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) override
    {
        const double C = hp_.number("C");
        gamma_ = hp_.number("gamma");
        detail::require(C > 0, "svm: C must be > 0");
        detail::require(gamma_ > 0, "svm: gamma must be > 0");
        const std::size_t n = static_cast<std::size_t>(X.rows());
        const Eigen::MatrixXd K = rbf_gram(X, X, gamma_);
        solutions_.clear();

        Eigen::MatrixXd full_coef;
        if (task_ == Task::Regression) {
            const double eps = hp_.number_or("epsilon", 0.1);
            detail::require(eps >= 0, "svm: epsilon must be >= 0");
            SmoProblem pr{&K, std::vector<double>(2 * n, 1.0), std::vector<double>(2 * n), C};
            for (std::size_t i = 0; i < n; ++i) {
                pr.s[n + i] = -1.0;
                pr.p[i] = eps - y(static_cast<Eigen::Index>(i));
                pr.p[n + i] = eps + y(static_cast<Eigen::Index>(i));
            }
            auto sol = smo_solve(pr);
            full_coef.resize(static_cast<Eigen::Index>(n), 1);
            for (std::size_t i = 0; i < n; ++i) full_coef(static_cast<Eigen::Index>(i), 0) = sol.beta[i] - sol.beta[n + i];
            rho_ = Eigen::VectorXd::Constant(1, sol.rho);
            solutions_.push_back(std::move(sol));
        } else {
            const int k = detail::num_classes(y);
            full_coef = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), k);
            rho_.resize(k);
            for (int c = 0; c < k; ++c) {
                SmoProblem pr{&K, std::vector<double>(n), std::vector<double>(n, -1.0), C};
                bool has_pos = false, has_neg = false;
                for (std::size_t i = 0; i < n; ++i) {
                    const bool pos = static_cast<int>(y(static_cast<Eigen::Index>(i))) == c;
                    pr.s[i] = pos ? 1.0 : -1.0;
                    (pos ? has_pos : has_neg) = true;
                }
                if (!has_pos || !has_neg) {
                    // Degenerate machine: constant decision of the only label seen.
                    rho_(c) = has_pos ? -1.0 : 1.0;
                    solutions_.push_back({});
                    continue;
                }
                auto sol = smo_solve(pr);
                for (std::size_t i = 0; i < n; ++i)
                    full_coef(static_cast<Eigen::Index>(i), c) = pr.s[i] * sol.beta[i];
                rho_(c) = sol.rho;
                solutions_.push_back(std::move(sol));
            }
        }

        // Keep rows with a non-zero coefficient in any machine.
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < full_coef.rows(); ++i)
            if ((full_coef.row(i).array() != 0.0).any()) keep.push_back(i);
        sv_.resize(static_cast<Eigen::Index>(keep.size()), X.cols());
        coef_.resize(static_cast<Eigen::Index>(keep.size()), full_coef.cols());
        for (std::size_t r = 0; r < keep.size(); ++r) {
            sv_.row(static_cast<Eigen::Index>(r)) = X.row(keep[r]);
            coef_.row(static_cast<Eigen::Index>(r)) = full_coef.row(keep[r]);
        }
    }

    Eigen::VectorXd do_predict(const Eigen::MatrixXd& X) const override
    {
        const Eigen::MatrixXd D = decision_function(X);
        if (task_ == Task::Regression) return D.col(0);
        Eigen::VectorXd out(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            Eigen::Index best = 0;
            for (Eigen::Index c = 1; c < D.cols(); ++c)
                if (D(i, c) > D(i, best)) best = c;
            out(i) = static_cast<double>(best);
        }
        return out;
    }

    json state() const override
    {
        return {{"gamma", gamma_}, {"rho", detail::to_json(rho_)}, {"sv", detail::to_json(sv_)},
                {"coef", detail::to_json(coef_)}};
    }

    void load_state(const json& j) override
    {
        gamma_ = j.at("gamma").get<double>();
        rho_ = detail::vector_from_json(j.at("rho"));
        sv_ = detail::matrix_from_json(j.at("sv"));
        coef_ = detail::matrix_from_json(j.at("coef"));
    }

private:
    double gamma_ = 1.0;
    Eigen::VectorXd rho_;
    Eigen::MatrixXd sv_;
    Eigen::MatrixXd coef_; // support rows x machines
    std::vector<SmoSolution> solutions_;
};

} // namespace roadrough::models
