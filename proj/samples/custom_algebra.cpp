// Builds a step-4 filiform group from structure constants, prints its frame
// and checks the degree of a curve tangent to the top layer.
#include "carnot/carnot.hpp"

#include <iostream>

int main() {
  using namespace carnot;
  GradedAlgebraSpec spec;
  spec.name = "filiform5";
  spec.layer_dims = {2, 1, 1, 1};
  spec.brackets = {{1, 2, 3, Rational(1)}, {1, 3, 4, Rational(1)}, {1, 4, 5, Rational(1)}};
  const GroupPtr g = make_group(spec);
  std::cout << g->name() << ": dimension " << g->dimension() << ", homogeneous dimension "
            << g->algebra().homogeneous_dimension() << "\n";
  for (const auto& line : g->frame().describe()) std::cout << line << "\n";

  const Curve c("top", -0.5, 0.5,
                [](double t) { return fixtures::vec({0, 0, 0, 0, t}); },
                [](double) { return fixtures::vec({0, 0, 0, 0, 1}); });
  const DegreeProfile prof = curve_degree(c, g->frame(), 201);
  std::cout << "curve degree " << prof.curve_degree << "\n";

  try {
    spec.brackets.push_back({2, 3, 4, Rational(1)});
    make_group(spec);
  } catch (const GroupValidationError& e) {
    std::cout << e.category() << ": " << e.what() << "\n";
  }
}
