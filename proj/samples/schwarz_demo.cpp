// Builds the deltoid reflection, lists its cusps, classifies a few points
// and traces the ray of angle 1/7.

#include <iostream>

#include "qdyn/qdyn.hpp"

using namespace qdyn;

int main() {
    // 1/z + z^2/2 on the unit disk
    SchwarzReflection S(build_qmd({RationalMap(Poly({2.0, 0.0, 0.0, 1.0}), Poly({0.0, 2.0}))}));
    std::cout << "degree " << S.degree() << "\n";
    for (const auto& s : S.singular_points()) std::cout << "cusp " << s.point << "\n";

    for (cplx z : {cplx(0.0), cplx(1.2, 0.3), cplx(3.0, 0.0), cplx(1.5001, 0.0)}) {
        PointClass c = classify_point(S, ExtPoint(z), 500);
        const char* kind = c.kind == PointClass::Kind::Escaping      ? "escaping"
                           : c.kind == PointClass::Kind::NonEscaping ? "non-escaping"
                                                                     : "undecided";
        std::cout << z << " " << kind;
        if (c.escaping()) std::cout << " at rank " << c.rank;
        std::cout << "\n";
    }

    auto report = connectedness_test(S, 200);
    std::cout << "connected: " << (report.verdict == ConnectednessReport::Verdict::Connected ? "yes" : "no") << "\n";

    RayTracer T(S);
    Landing L = landing_point(T, itinerary_of(Angle(1, 7), 2), 40);
    std::cout << "ray 1/7 lands at " << L.point << " (tail " << L.residual << ")\n";
}
