"""Regenerates src/oracle_values.hpp with 50-digit reference values.

Every grid point and epsilon is the exact binary value of the double the C++
code sees, so the only error left on the C++ side is its own rounding.
"""
import pathlib

from mpmath import mp, mpf, log, exp

mp.dps = 50

GRID = [1e-12, 1e-9, 1e-6, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2, 0.3, 0.36787944117144233,
        0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999, 1 - 1e-4, 1 - 1e-6, 1 - 1e-9,
        1 - 1e-12, 0.75]
EPS_PAIRS = [(1e-2, 1e-5), (1e-1, 1e-4), (1e-3, 1e-6), (1e-2, 1e-10)]


def x(v):
    return mpf(float(v))


def gumbel_map(p):
    return -log(-log(x(p)))


def bounded(p, e1, e2):
    return -log(x(e1) - log(x(p) + x(e2)))


def logit(p):
    return log(x(p) / (1 - x(p)))


def lit(v):
    return mp.nstr(v, 25, min_fixed=-5, max_fixed=5, strip_zeros=False)


def main():
    out = ["#pragma once", "", "// Generated by tests/oracle/gen_transform_oracle.py; do not edit.", "",
           "#include <array>", "", "namespace iam::oracle {", "",
           "struct TransformPoint {", "  double p;", "  double gumbel_map;", "  double logit;",
           "  double bounded[%d];  // one per kEpsPairs entry" % len(EPS_PAIRS), "};", "",
           "struct EpsPair {", "  double eps1;", "  double eps2;", "  double lower;", "  double upper;", "};", ""]
    out.append("inline constexpr std::array<EpsPair, %d> kEpsPairs = {{" % len(EPS_PAIRS))
    for e1, e2 in EPS_PAIRS:
        lower = -log(x(e1) - log(x(e2)))
        upper = -log(x(e1) - log(1 + x(e2)))
        out.append("    {%r, %r, %s, %s}," % (e1, e2, lit(lower), lit(upper)))
    out.append("}};")
    out.append("")
    out.append("inline constexpr std::array<TransformPoint, %d> kTransformPoints = {{" % len(GRID))
    for p in GRID:
        b = ", ".join(lit(bounded(p, e1, e2)) for e1, e2 in EPS_PAIRS)
        out.append("    {%r, %s, %s, {%s}}," % (p, lit(gumbel_map(p)), lit(logit(p)), b))
    out.append("}};")
    out.append("")
    e1, e2 = EPS_PAIRS[-1]
    out.append("// GumbelMap minus Bounded GumbelMap at p = 0.5 for the last kEpsPairs entry.")
    out.append("inline constexpr double kGapHalf = %s;" % lit(gumbel_map(0.5) - bounded(0.5, e1, e2)))
    out.append("")
    out.append("}  // namespace iam::oracle")
    target = pathlib.Path(__file__).resolve().parents[2] / "src" / "oracle_values.hpp"
    target.write_text("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
