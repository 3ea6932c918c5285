#ifndef LFPPL_TESTS_FIXTURES_HPP
#define LFPPL_TESTS_FIXTURES_HPP

#include <string>

#include "lfppl/compile.hpp"
#include "lfppl/experiments.hpp"

namespace fixtures {

inline lfppl::Quadruple fig1(double q = 0.5, double y = 1.0) {
    return lfppl::compile_text(lfppl::fig1_program_text(), "fig1",
                               {{{"q", q}, {"y", y}}});
}

inline lfppl::Quadruple gmm() {
    return lfppl::compile_text(lfppl::gmm_program_text(), "gmm");
}

inline lfppl::Quadruple heavytail(size_t dims) {
    return lfppl::compile_text(lfppl::heavytail_program_text(dims), "heavytail");
}

inline lfppl::Quadruple twolevel() {
    return lfppl::compile_text(lfppl::twolevel_program_text(), "twolevel");
}

// One normal draw observed once: delta = {z1}, gamma = {}.
inline const char* kNormalModel =
    "(let [x (sample (normal 0 1))]\n"
    "  (observe (normal x 1) 0.5)\n"
    "  x)\n";

// Chained normals: z2's mean is z1, both continuous.
inline const char* kChainedNormals =
    "(let [a (sample (normal 0 2))]\n"
    "  (let [b (sample (normal a 1))]\n"
    "    (observe (normal b 1) 0.3)\n"
    "    b))\n";

inline lfppl::Quadruple normal_model() {
    return lfppl::compile_text(kNormalModel, "normal");
}

inline lfppl::Quadruple chained_normals() {
    return lfppl::compile_text(kChainedNormals, "chained");
}

}  // namespace fixtures

#endif
