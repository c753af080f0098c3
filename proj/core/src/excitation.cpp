#include "petmpc/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace petmpc {

void PeParams::validate() const {
  if (Np < 1 || lp < 1) throw ContractViolation("PeParams: Np and lp must be >= 1");
  if (!(rho0 > 0.0)) throw ContractViolation("PeParams: rho0 must be > 0");
  if (!(eps_pd > 0.0)) throw ContractViolation("PeParams: eps_pd must be > 0");
  if (rho1 && !(*rho1 > rho0)) throw ContractViolation("PeParams: rho1 must exceed rho0");
}

PeBuffer::PeBuffer(PeParams params, int input_dim) : params_(params), input_dim_(input_dim) {
  params_.validate();
  if (input_dim < 1) throw ContractViolation("PeBuffer: input_dim must be >= 1");
}

void PeBuffer::push(const Vector& w) {
  if (w.size() != input_dim_) throw ContractViolation("PeBuffer::push: dimension mismatch");
  history_.push_back(w);
  while (static_cast<int>(history_.size()) > required_length()) history_.pop_front();
}

const Vector& PeBuffer::at_back(int back) const {
  if (back < 0 || back >= size()) throw ContractViolation("PeBuffer::at_back: out of range");
  return history_[history_.size() - 1 - static_cast<size_t>(back)];
}

namespace {

// M over an explicit sequence (newest last).
Matrix build_M_seq(const std::vector<Vector>& seq, const PeParams& p, int m) {
  const int need = p.lp + p.Np - 1;
  if (static_cast<int>(seq.size()) < need)
    throw ContractViolation("build_M: insufficient history");
  const int dim = m * p.Np;
  Matrix M = -p.rho0 * Matrix::Identity(dim, dim);
  const int last = static_cast<int>(seq.size()) - 1;
  for (int j = 0; j < p.lp; ++j) {
    Vector stack(dim);
    for (int k = 0; k < p.Np; ++k) stack.segment(k * m, m) = seq[last - j - k];
    M += stack * stack.transpose();
  }
  return M;
}

std::vector<Vector> tail_sequence(const PeBuffer& buf, const std::optional<Vector>& candidate) {
  std::vector<Vector> seq(buf.history().begin(), buf.history().end());
  if (candidate) {
    if (candidate->size() != buf.input_dim())
      throw ContractViolation("build_M: candidate dimension mismatch");
    seq.push_back(*candidate);
  }
  return seq;
}

}  // namespace

Matrix build_M(const PeBuffer& buf, const std::optional<Vector>& candidate) {
  return build_M_seq(tail_sequence(buf, candidate), buf.params(), buf.input_dim());
}

bool is_pe(const Matrix& M, double eps_pd) {
  Matrix Msym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Msym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalFailure("is_pe: eigen decomposition failed");
  return eig.eigenvalues().minCoeff() >= eps_pd;
}

bool lookahead_feasible(const PeBuffer& buf, const Vector& w0) {
  const PeParams& p = buf.params();
  std::vector<Vector> seq = tail_sequence(buf, w0);
  if (!is_pe(build_M_seq(seq, p, buf.input_dim()), p.eps_pd)) return false;
  for (int k = 1; k < p.Np; ++k) {
    seq.push_back(seq[seq.size() - static_cast<size_t>(p.lp)]);
    if (!is_pe(build_M_seq(seq, p, buf.input_dim()), p.eps_pd)) return false;
  }
  return true;
}

namespace {

void grid_candidates(const Polytope& W, int grid_density, std::vector<Vector>& out) {
  const int m = W.dim();
  auto [lo, hi] = W.bounding_box();
  std::vector<Vector> axes(m);
  for (int d = 0; d < m; ++d) {
    Vector axis(grid_density);
    for (int k = 0; k < grid_density; ++k)
      axis(k) = grid_density == 1 ? 0.5 * (lo(d) + hi(d))
                                  : lo(d) + (hi(d) - lo(d)) * k / (grid_density - 1);
    axes[d] = axis;
  }
  Vector w(m);
  std::function<void(int)> rec = [&](int d) {
    if (d == m) {
      if (W.contains(w, 1e-9)) out.push_back(w);
      return;
    }
    for (int k = 0; k < grid_density; ++k) {
      w(d) = axes[d](k);
      rec(d + 1);
    }
  };
  rec(0);
}

// lexicographically larger wins the final tie
bool lex_greater(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) > b(i);
  }
  return false;
}

}  // namespace

SelectionResult select_w0(const PeBuffer& buf, const Polytope& W, const Matrix& R,
                          int grid_density) {
  if (!buf.ready()) throw ContractViolation("select_w0: buffer not ready");
  const Vector trivial = buf.at_back(buf.params().lp - 1);  // w(i - lp) for the incoming step
  std::vector<Vector> cands;
  grid_candidates(W, grid_density, cands);
  cands.push_back(trivial);

  SelectionResult best;
  bool found = false;
  for (const auto& c : cands) {
    if (!lookahead_feasible(buf, c)) continue;
    const double cost = c.dot(R * c);
    bool better = false;
    if (!found) {
      better = true;
    } else if (cost < best.cost - 1e-15) {
      better = true;
    } else if (cost <= best.cost + 1e-15) {
      if (c.norm() < best.w0.norm() - 1e-15)
        better = true;
      else if (c.norm() <= best.w0.norm() + 1e-15 && lex_greater(c, best.w0))
        better = true;
    }
    if (better) {
      best.w0 = c;
      best.cost = cost;
      found = true;
    }
    ++best.candidate_count;
  }
  if (!found)
    throw FeasibilityLoss("select_w0: no persistently exciting candidate (buffer invariant broken)");
  best.trivial_used = (best.w0 - trivial).lpNorm<Eigen::Infinity>() == 0.0;
  return best;
}

PeBuffer init_buffer(const Polytope& W, const PeParams& params, unsigned seed, int attempts_max) {
  params.validate();
  if (attempts_max < 1) throw ContractViolation("init_buffer: attempts_max must be >= 1");
  const auto verts = W.vertices();
  if (verts.empty()) throw ContractViolation("init_buffer: W has no vertices");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, verts.size() - 1);
  std::uniform_real_distribution<double> scale(0.5, 1.0);
  for (int attempt = 0; attempt < attempts_max; ++attempt) {
    // draw one period of lp values and tile it: an lp-periodic buffer whose M
    // is positive definite satisfies the lookahead constraints by itself
    // (every shifted window rebuilds the same M), realizing Assumption 8
    std::vector<Vector> period(static_cast<size_t>(params.lp));
    for (auto& w : period) w = scale(rng) * verts[pick(rng)];
    PeBuffer buf(params, W.dim());
    for (int k = 0; k < buf.required_length(); ++k)
      buf.push(period[static_cast<size_t>(k % params.lp)]);
    if (is_pe(build_M(buf), params.eps_pd) && lookahead_feasible(buf, buf.at_back(params.lp - 1)))
      return buf;
  }
  throw InitializationError(
      "init_buffer: attempts exhausted; consider a smaller rho0 or larger excitation amplitude");
}

double rho1_trace_bound(const PeBuffer& buf, const Polytope& W) {
  double max_sq = 0.0;
  for (const auto& v : W.vertices()) max_sq = std::max(max_sq, v.squaredNorm());
  return buf.params().lp * buf.params().Np * max_sq;
}

}  // namespace petmpc
