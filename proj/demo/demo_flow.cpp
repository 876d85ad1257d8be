// Small spectral-flow demonstration on an 8-qubit Wen plaquette torus:
// transport the band projectors, then watch a flowed two-defect state sit
// still under the survival bound.

#include <cstdio>

#include "locgap/dynamics.hpp"

using namespace locgap;

int main() {
  auto model = build_model(ModelName::wen_plaquette, {2, 4, 1});
  SyndromeMap map(model);
  auto inst = DenseInstance::make(model, uniform_field_terms(model.lattice(), 1.0, 1.0));

  const double s = 0.05;
  FlowOptions opts;
  opts.n_steps = 8;
  opts.track_eigensystems = true;
  auto flow = flow_unitary(inst, s, opts);
  std::printf("flow to s=%.2f: projector defect %.2e, unitarity defect %.2e\n", s,
              flow.projector_defect, flow.unitarity_defect);

  auto band = build_band_basis(map, 2);
  MatrixXd flowed = gemm(flow.u, band.columns);
  auto off = offdiagonal_sum(inst, s, flowed, 0);
  std::printf("two-defect band (%ld states): off-diagonal sum %.4f, truncation norm %.4f\n",
              static_cast<long>(band.columns.cols()), off.g_sum, off.q_norm);

  auto surv = survival_series(flow.eig_s, flowed.col(0), {1.0, 2.0, 5.0, 10.0});
  std::printf("survival of the flowed state:  t=1: %.6f   t=2: %.6f   t=5: %.6f   t=10: %.6f\n",
              surv[0], surv[1], surv[2], surv[3]);
  std::printf("truncation bound 1 - t*norm:    t=1: %.6f   t=2: %.6f\n", 1 - off.q_norm,
              1 - 2 * off.q_norm);
  return 0;
}
