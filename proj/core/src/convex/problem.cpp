#include "isac/convex/problem.hpp"

#include <algorithm>
#include <cmath>

namespace isac::convex {

namespace {

std::vector<double> to_std(const RVec& v) { return {v.data(), v.data() + v.size()}; }

void check_len(const RVec& a, int n, const char* what) {
  if (a.size() != n) throw InvalidArgument(std::string(what) + ": coefficient length != problem dimension");
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

CMat hermitian_from_params(const RVec& p, int m) {
  if (p.size() != hermitian_param_count(m)) throw InvalidArgument("hermitian_from_params: bad length");
  CMat R(m, m);
  for (int i = 0; i < m; ++i) R(i, i) = p[i];
  int k = m;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, k += 2) {
      R(i, j) = cdouble(p[k], p[k + 1]);
      R(j, i) = cdouble(p[k], -p[k + 1]);
    }
  return R;
}

RVec params_from_hermitian(const CMat& R) {
  const int m = static_cast<int>(R.rows());
  RVec p(hermitian_param_count(m));
  for (int i = 0; i < m; ++i) p[i] = R(i, i).real();
  int k = m;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, k += 2) {
      const cdouble z = 0.5 * (R(i, j) + std::conj(R(j, i)));
      p[k] = z.real();
      p[k + 1] = z.imag();
    }
  return p;
}

RVec hermitian_gradient(const CMat& G) {
  const int m = static_cast<int>(G.rows());
  RVec c(hermitian_param_count(m));
  for (int i = 0; i < m; ++i) c[i] = G(i, i).real();
  int k = m;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, k += 2) {
      const cdouble z = G(i, j) + std::conj(G(j, i));
      c[k] = z.real();
      c[k + 1] = z.imag();
    }
  return c;
}

ConvexProblem::ConvexProblem(int n, int m) : vector_dim(n), matrix_dim(m) {
  objective.c = RVec::Zero(dim());
}

RVec ConvexProblem::lift_matrix_coeffs(const RVec& pc) const {
  RVec a = zeros();
  a.tail(hermitian_param_count(matrix_dim)) = pc;
  return a;
}

CMat ConvexProblem::matrix_block(const RVec& v) const {
  return hermitian_from_params(v.tail(hermitian_param_count(matrix_dim)), matrix_dim);
}

RVec ConvexProblem::pack(const RVec& u, const CMat& R) const {
  RVec v(dim());
  v.head(vector_dim) = u;
  if (matrix_dim > 0) v.tail(hermitian_param_count(matrix_dim)) = params_from_hermitian(R);
  return v;
}

double ConvexProblem::objective_value(const RVec& v) const {
  double f = objective.c.size() ? objective.c.dot(v) : 0.0;
  if (objective.Q.size()) f += v.dot(objective.Q * v);
  for (const auto& t : objective.logs) f -= t.weight * std::log(t.a.dot(v) + t.b);
  return f;
}

RVec ConvexProblem::objective_gradient(const RVec& v) const {
  RVec g = objective.c.size() ? objective.c : zeros();
  if (objective.Q.size()) g += 2.0 * (objective.Q * v);
  for (const auto& t : objective.logs) g -= t.weight / (t.a.dot(v) + t.b) * t.a;
  return g;
}

bool ConvexProblem::has_psd() const {
  return std::any_of(constraints.begin(), constraints.end(),
                     [](const Constraint& c) { return std::holds_alternative<PsdCone>(c); });
}

void ConvexProblem::validate() const {
  const int n = dim();
  if (vector_dim < 0 || matrix_dim < 0) throw InvalidArgument("problem: negative block size");
  if (objective.c.size() && objective.c.size() != n) throw InvalidArgument("objective: linear term length");
  auto check_psd = [&](const RMat& Q, const char* what) {
    if (Q.rows() != n || Q.cols() != n) throw InvalidArgument(std::string(what) + ": quadratic term dimension");
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-8 * scale)
      throw InvalidArgument(std::string(what) + ": quadratic coefficient is not PSD");
  };
  if (objective.Q.size()) check_psd(objective.Q, "objective");
  for (const auto& t : objective.logs) check_len(t.a, n, "objective log term");
  for (const auto& c : constraints) {
    std::visit(overloaded{
                   [&](const AffineIneq& a) { check_len(a.a, n, "AffineIneq"); },
                   [&](const AffineEq& a) { check_len(a.a, n, "AffineEq"); },
                   [&](const Ball& b) {
                     for (int i : b.indices)
                       if (i < 0 || i >= n) throw InvalidArgument("Ball: index out of range");
                   },
                   [&](const ConvexQuadIneq& q) {
                     check_psd(q.Q, "ConvexQuadIneq");
                     check_len(q.c, n, "ConvexQuadIneq");
                   },
                   [&](const LogAffine& l) {
                     check_len(l.a, n, "LogAffine");
                     if (l.mu_index < 0 || l.mu_index >= n) throw InvalidArgument("LogAffine: mu index out of range");
                   },
                   [&](const PsdCone&) {
                     if (matrix_dim == 0) throw InvalidArgument("PsdCone: problem has no matrix block");
                   },
                   [&](const TraceCap&) {
                     if (matrix_dim == 0) throw InvalidArgument("TraceCap: problem has no matrix block");
                   },
               },
               c);
  }
}

double constraint_value(const ConvexProblem& p, const Constraint& c, const RVec& v) {
  return std::visit(
      overloaded{
          [&](const AffineIneq& a) { return a.a.dot(v) - a.b; },
          [&](const AffineEq& a) { return a.a.dot(v) - a.b; },
          [&](const Ball& b) {
            double s = 0.0;
            for (int i : b.indices) s += v[i] * v[i];
            return s - b.radius_sq;
          },
          [&](const ConvexQuadIneq& q) { return v.dot(q.Q * v) + q.c.dot(v) + q.d; },
          [&](const LogAffine& l) {
            const double arg = l.a.dot(v) + l.b;
            return arg > 0.0 ? v[l.mu_index] - std::log(arg) : std::numeric_limits<double>::infinity();
          },
          [&](const PsdCone&) {
            Eigen::SelfAdjointEigenSolver<CMat> es(p.matrix_block(v), Eigen::EigenvaluesOnly);
            return -es.eigenvalues().minCoeff();
          },
          [&](const TraceCap& t) { return p.matrix_block(v).trace().real() - t.cap; },
      },
      c);
}

double max_violation(const ConvexProblem& p, const RVec& v) {
  double worst = 0.0;
  for (const auto& c : p.constraints) {
    const double f = constraint_value(p, c, v);
    worst = std::max(worst, std::holds_alternative<AffineEq>(c) ? std::abs(f) : f);
  }
  return worst;
}

nlohmann::json to_json(const ConvexProblem& p) {
  nlohmann::json j;
  j["vector_dim"] = p.vector_dim;
  j["matrix_dim"] = p.matrix_dim;
  auto& obj = j["objective"];
  obj["c"] = to_std(p.objective.c);
  if (p.objective.Q.size()) {
    auto& q = obj["Q"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.objective.Q.rows(); ++i) q.push_back(to_std(p.objective.Q.row(i).transpose()));
  }
  auto& logs = obj["logs"] = nlohmann::json::array();
  for (const auto& t : p.objective.logs) logs.push_back({{"weight", t.weight}, {"a", to_std(t.a)}, {"b", t.b}});

  auto& cons = j["constraints"] = nlohmann::json::array();
  for (const auto& c : p.constraints) {
    cons.push_back(std::visit(
        overloaded{
            [](const AffineIneq& a) { return nlohmann::json{{"type", "AffineIneq"}, {"a", to_std(a.a)}, {"b", a.b}}; },
            [](const AffineEq& a) { return nlohmann::json{{"type", "AffineEq"}, {"a", to_std(a.a)}, {"b", a.b}}; },
            [](const Ball& b) {
              return nlohmann::json{{"type", "Ball"}, {"indices", b.indices}, {"radius_sq", b.radius_sq}};
            },
            [](const ConvexQuadIneq& q) {
              nlohmann::json rows = nlohmann::json::array();
              for (Eigen::Index i = 0; i < q.Q.rows(); ++i) rows.push_back(to_std(q.Q.row(i).transpose()));
              return nlohmann::json{{"type", "ConvexQuadIneq"}, {"Q", rows}, {"c", to_std(q.c)}, {"d", q.d}};
            },
            [](const LogAffine& l) {
              return nlohmann::json{{"type", "LogAffine"}, {"mu_index", l.mu_index}, {"a", to_std(l.a)}, {"b", l.b}};
            },
            [](const PsdCone&) { return nlohmann::json{{"type", "PsdCone"}}; },
            [](const TraceCap& t) { return nlohmann::json{{"type", "TraceCap"}, {"cap", t.cap}}; },
        },
        c));
  }
  return j;
}

}  // namespace isac::convex
