#pragma once

#include <optional>
#include <vector>

#include "nlc/types.hpp"

namespace nlc {

// Semi-infinite uniform chain attached on both sides (unbiased).
struct LeadSpec {
  double v = 0.0;
  double h = 1.0;
};

// N-site tight-binding chain with directed nearest-neighbour hoppings.
// hop_up[i] = h_{n,n+1} and hop_down[i] = h_{n+1,n} for the link n = i+1.
class LatticeModel {
public:
  LatticeModel() = default;
  // Missing hop_down defaults to conj(hop_up).
  LatticeModel(std::vector<cd> onsite, std::vector<cd> hop_up,
               std::optional<std::vector<cd>> hop_down = std::nullopt,
               std::optional<LeadSpec> leads = std::nullopt);

  int size() const { return static_cast<int>(onsite_.size()); }

  cd onsite(int n) const { return onsite_[n - 1]; }
  // H_{m,n}: onsite for m == n, hopping for |m-n| == 1, zero otherwise or
  // whenever a label falls outside [1, N].
  cd element(int m, int n) const;
  cd hopping(int m, int n) const { return m == n ? cd{} : element(m, n); }

  const std::vector<cd>& onsite_values() const { return onsite_; }
  const std::vector<cd>& hop_up() const { return hop_up_; }
  const std::vector<cd>& hop_down() const { return hop_down_; }
  const std::optional<LeadSpec>& leads() const { return leads_; }

  bool is_hermitian(double tol = 0.0) const;
  bool is_equidirectional(double tol = 0.0) const;
  double max_element() const;
  double max_hopping() const;

  LatticeModel with_leads(std::optional<LeadSpec> leads) const;

private:
  std::vector<cd> onsite_;
  std::vector<cd> hop_up_;
  std::vector<cd> hop_down_;
  std::optional<LeadSpec> leads_;
};

CMatrix hamiltonian_matrix(const LatticeModel& model);

// eta_{m,n} = h_{m,n} / h_{n,m} for adjacent sites m, n.
cd hopping_ratio(const LatticeModel& model, int m, int n);

enum class DriveTarget { hoppings, onsite };

// H(t) = H0 with the masked elements scaled by (1 + f sin wt).
struct DrivenModel {
  LatticeModel base;
  DriveTarget target = DriveTarget::hoppings;
  double f = 0.0;
  double omega = 1.0;
  // One flag per link for hoppings, one per site for onsite.
  std::vector<bool> mask;

  double period() const;
  void validate() const;
};

LatticeModel model_at_time(const DrivenModel& driven, double t);

// Static part H0 and modulation amplitude H1 with H(t) = H0 + H1 sin(wt).
std::pair<CMatrix, CMatrix> drive_components(const DrivenModel& driven);

} // namespace nlc
