// Simulates one panel under the null and one under a VMA(1) alternative, then
// runs the three tests on each.

#include <iostream>

#include "hdwn/hdwn.hpp"

namespace {

void show(const char* label, const hdwn::TestReport& r) {
  std::cout << label << ": T_MAX=" << r.max.t_max << " (p=" << r.max.p_value << "), T_SUM=" << r.sum.t_sum
            << " (p=" << r.sum.p_value << "), T_FC=" << r.t_fc << " (p=" << r.fc_p_value << ")\n";
}

}  // namespace

int main() {
  const hdwn::DgpSpec null_spec{hdwn::Scenario::NullII, hdwn::Innovation::Gaussian, 200, 60, std::nullopt, 11};
  show("null (setting II)", hdwn::run_all(hdwn::gen_panel(null_spec), 2, 0.05));

  const hdwn::DgpSpec alt_spec{hdwn::Scenario::VMA1, hdwn::Innovation::Gaussian, 200, 60, 8, 11};
  show("VMA(1), m=8      ", hdwn::run_all(hdwn::gen_panel(alt_spec), 2, 0.05));
}
