#include "nlc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlc/error.hpp"

namespace nlc {

const char* error_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::invalid_argument: return "InvalidArgument";
  case ErrorCode::config: return "ConfigError";
  case ErrorCode::domain: return "DomainError";
  case ErrorCode::singular_ratio: return "SingularRatio";
  case ErrorCode::singular_current: return "SingularCurrent";
  case ErrorCode::zero_amplitude_on_path: return "ZeroAmplitudeOnPath";
  case ErrorCode::singular_system: return "SingularSystem";
  case ErrorCode::resonant_denominator: return "ResonantDenominator";
  case ErrorCode::zero_transmission: return "ZeroTransmission";
  case ErrorCode::non_convergence: return "NonConvergence";
  case ErrorCode::unconverged_truncation: return "UnconvergedTruncation";
  case ErrorCode::grid_mismatch: return "GridMismatch";
  case ErrorCode::io: return "IOError";
  }
  return "Error";
}

namespace {

bool finite(cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_finite(const std::vector<cd>& values, const char* what) {
  for (const cd& z : values) {
    if (!finite(z)) {
      throw Error(ErrorCode::invalid_argument, std::string("non-finite entry in ") + what);
    }
  }
}

} // namespace

LatticeModel::LatticeModel(std::vector<cd> onsite, std::vector<cd> hop_up,
                           std::optional<std::vector<cd>> hop_down,
                           std::optional<LeadSpec> leads)
  : onsite_(std::move(onsite)), hop_up_(std::move(hop_up)), leads_(leads) {
  if (onsite_.empty()) {
    throw Error(ErrorCode::invalid_argument, "model needs at least one site");
  }
  const std::size_t links = onsite_.size() - 1;
  if (hop_up_.size() != links) {
    throw Error(ErrorCode::invalid_argument,
                "hop_up must have N-1 = " + std::to_string(links) + " entries, got " +
                  std::to_string(hop_up_.size()));
  }
  if (hop_down) {
    hop_down_ = std::move(*hop_down);
    if (hop_down_.size() != links) {
      throw Error(ErrorCode::invalid_argument,
                  "hop_down must have N-1 = " + std::to_string(links) + " entries, got " +
                    std::to_string(hop_down_.size()));
    }
  } else {
    hop_down_.resize(links);
    std::transform(hop_up_.begin(), hop_up_.end(), hop_down_.begin(),
                   [](cd h) { return std::conj(h); });
  }
  check_finite(onsite_, "onsite");
  check_finite(hop_up_, "hop_up");
  check_finite(hop_down_, "hop_down");
  if (leads_) {
    if (!std::isfinite(leads_->v) || !std::isfinite(leads_->h) || leads_->h == 0.0) {
      throw Error(ErrorCode::invalid_argument, "lead needs finite v and nonzero finite h");
    }
  }
}

cd LatticeModel::element(int m, int n) const {
  const int N = size();
  if (m < 1 || n < 1 || m > N || n > N) return {};
  if (m == n) return onsite_[m - 1];
  if (n == m + 1) return hop_up_[m - 1];
  if (m == n + 1) return hop_down_[n - 1];
  return {};
}

bool LatticeModel::is_hermitian(double tol) const {
  for (const cd& v : onsite_) {
    if (std::abs(v.imag()) > tol) return false;
  }
  for (std::size_t i = 0; i < hop_up_.size(); ++i) {
    if (std::abs(hop_down_[i] - std::conj(hop_up_[i])) > tol) return false;
  }
  return true;
}

bool LatticeModel::is_equidirectional(double tol) const {
  for (std::size_t i = 0; i < hop_up_.size(); ++i) {
    if (std::abs(hop_down_[i] - hop_up_[i]) > tol) return false;
  }
  return true;
}

double LatticeModel::max_element() const {
  double m = 0.0;
  for (const cd& v : onsite_) m = std::max(m, std::abs(v));
  return std::max(m, max_hopping());
}

double LatticeModel::max_hopping() const {
  double m = 0.0;
  for (const cd& h : hop_up_) m = std::max(m, std::abs(h));
  for (const cd& h : hop_down_) m = std::max(m, std::abs(h));
  return m;
}

LatticeModel LatticeModel::with_leads(std::optional<LeadSpec> leads) const {
  return LatticeModel(onsite_, hop_up_, hop_down_, leads);
}

CMatrix hamiltonian_matrix(const LatticeModel& model) {
  const int N = model.size();
  CMatrix H = CMatrix::Zero(N, N);
  for (int i = 0; i < N; ++i) H(i, i) = model.onsite_values()[i];
  for (int i = 0; i + 1 < N; ++i) {
    H(i, i + 1) = model.hop_up()[i];
    H(i + 1, i) = model.hop_down()[i];
  }
  return H;
}

cd hopping_ratio(const LatticeModel& model, int m, int n) {
  if (std::abs(m - n) != 1 || m < 1 || n < 1 || m > model.size() || n > model.size()) {
    throw Error(ErrorCode::invalid_argument, "hopping ratio needs two adjacent sites");
  }
  const cd denominator = model.hopping(n, m);
  if (denominator == cd{}) {
    throw Error(ErrorCode::singular_ratio,
                "zero hopping h_{" + std::to_string(n) + "," + std::to_string(m) + "}");
  }
  return model.hopping(m, n) / denominator;
}

double DrivenModel::period() const { return 2.0 * std::numbers::pi / omega; }

void DrivenModel::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorCode::invalid_argument, "drive frequency must be positive");
  }
  if (!(f >= 0.0 && f < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "relative drive amplitude must lie in [0, 1)");
  }
  const std::size_t expected = target == DriveTarget::hoppings
                                 ? static_cast<std::size_t>(base.size() - 1)
                                 : static_cast<std::size_t>(base.size());
  if (mask.size() != expected) {
    throw Error(ErrorCode::invalid_argument,
                "drive mask must have " + std::to_string(expected) + " entries");
  }
}

LatticeModel model_at_time(const DrivenModel& driven, double t) {
  const double scale = 1.0 + driven.f * std::sin(driven.omega * std::fmod(t, driven.period()));
  std::vector<cd> v = driven.base.onsite_values();
  std::vector<cd> up = driven.base.hop_up();
  std::vector<cd> down = driven.base.hop_down();
  if (driven.target == DriveTarget::hoppings) {
    for (std::size_t i = 0; i < up.size(); ++i) {
      if (driven.mask[i]) {
        up[i] *= scale;
        down[i] *= scale;
      }
    }
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (driven.mask[i]) v[i] *= scale;
    }
  }
  return LatticeModel(std::move(v), std::move(up), std::move(down), driven.base.leads());
}

std::pair<CMatrix, CMatrix> drive_components(const DrivenModel& driven) {
  const CMatrix H0 = hamiltonian_matrix(driven.base);
  const int N = driven.base.size();
  CMatrix H1 = CMatrix::Zero(N, N);
  if (driven.target == DriveTarget::hoppings) {
    for (int i = 0; i + 1 < N; ++i) {
      if (driven.mask[i]) {
        H1(i, i + 1) = driven.f * H0(i, i + 1);
        H1(i + 1, i) = driven.f * H0(i + 1, i);
      }
    }
  } else {
    for (int i = 0; i < N; ++i) {
      if (driven.mask[i]) H1(i, i) = driven.f * H0(i, i);
    }
  }
  return {H0, H1};
}

} // namespace nlc
