// Walks through the main objects on the first Heisenberg group: the group
// law, the frame, the layer-max distance and the area formula for a vertical
// segment.
#include "carnot/carnot.hpp"

#include <iostream>

int main() {
  using namespace carnot;
  const GroupPtr g = make_group("heisenberg");
  const auto names = g->law().variable_names();
  for (int i = 0; i < g->dimension(); ++i) std::cout << "Q_" << i + 1 << " = " << g->law().Q(i).to_string(names) << "\n";
  for (const auto& line : g->frame().describe()) std::cout << line << "\n";

  const HomogeneousDistance D(g);
  Vector x(3), y(3);
  x << 1, 0, 0;
  y << 0, 1, 0;
  std::cout << "x*y = " << g->law().multiply(x, y).transpose() << "\n";
  std::cout << "d(x, y) = " << D.distance(x, y) << "\n";

  const Curve vertical = fixtures::curve_fixture("vertical").curve();
  AreaFormulaOptions opt;
  opt.levels = 6;
  const AreaFormulaReport rep = area_formula_residual(vertical, D, AmbientMetric::euclidean(), opt);
  std::cout << "degree " << rep.q << ", c_q S^q ~ " << rep.lhs << ", integral " << rep.rhs << ", residual "
            << rep.residual << "\n";
}
