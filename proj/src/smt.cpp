#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>

#include "numguard/hexfloat.hpp"
#include "numguard/orient_search.hpp"

namespace numguard {

namespace {

std::string bits(std::uint64_t value, int count) {
  std::string s(static_cast<std::size_t>(count), '0');
  for (int i = 0; i < count; ++i) {
    if ((value >> (count - 1 - i)) & 1U) s[static_cast<std::size_t>(i)] = '1';
  }
  return "#b" + s;
}

struct FpFormat {
  int exponent_bits;
  int significand_bits;  // including the hidden bit
};

FpFormat format_of(FloatWidth width) {
  return width == FloatWidth::Binary32 ? FpFormat{8, 24} : FpFormat{11, 53};
}

// One base rotation (p1, p2, p3) of the spanning points, in the fixed
// evaluation order of orient_determinant.
void emit_float_det(std::ostream& out, const char* name, char p1, char p2, char p3) {
  auto c = [](char p, char axis) { return std::string{p, axis}; };
  out << "(define-fun " << name << " () F\n"
      << "  (let ((ux (fp.sub RNE " << c(p2, 'x') << ' ' << c(p1, 'x') << "))"
      << " (uy (fp.sub RNE " << c(p2, 'y') << ' ' << c(p1, 'y') << "))"
      << " (uz (fp.sub RNE " << c(p2, 'z') << ' ' << c(p1, 'z') << "))\n"
      << "        (vx (fp.sub RNE " << c(p3, 'x') << ' ' << c(p1, 'x') << "))"
      << " (vy (fp.sub RNE " << c(p3, 'y') << ' ' << c(p1, 'y') << "))"
      << " (vz (fp.sub RNE " << c(p3, 'z') << ' ' << c(p1, 'z') << "))\n"
      << "        (wx (fp.sub RNE dx " << c(p1, 'x') << "))"
      << " (wy (fp.sub RNE dy " << c(p1, 'y') << "))"
      << " (wz (fp.sub RNE dz " << c(p1, 'z') << ")))\n"
      << "  (let ((m1 (fp.sub RNE (fp.mul RNE vy wz) (fp.mul RNE vz wy)))\n"
      << "        (m2 (fp.sub RNE (fp.mul RNE vx wz) (fp.mul RNE vz wx)))\n"
      << "        (m3 (fp.sub RNE (fp.mul RNE vx wy) (fp.mul RNE vy wx))))\n"
      << "  (fp.add RNE (fp.sub RNE (fp.mul RNE ux m1) (fp.mul RNE uy m2)) (fp.mul RNE uz m3)))))\n";
}

}  // namespace

std::string smt_fp_literal(double value, FloatWidth width) {
  if (width == FloatWidth::Binary32) {
    const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(value));
    return "(fp " + bits(u >> 31, 1) + ' ' + bits((u >> 23) & 0xffU, 8) + ' ' +
           bits(u & 0x7fffffU, 23) + ')';
  }
  const auto u = std::bit_cast<std::uint64_t>(value);
  return "(fp " + bits(u >> 63, 1) + ' ' + bits((u >> 52) & 0x7ffU, 11) + ' ' +
         bits(u & 0xfffffffffffffULL, 52) + ')';
}

void emit_smt(const OrientSearchConfig& config, std::ostream& out) {
  config.validate();
  const FpFormat fmt = format_of(config.width);
  const double lo = std::ldexp(1.0, config.exponent_min);
  const double hi = std::ldexp(1.0, config.exponent_max + 1);
  const double d_hi = std::ldexp(1.0, config.exponent_max + 2);

  out << "; numguard emit-smt schema_version=1\n"
      << "; query: "
      << (config.mode == SearchMode::Majority
              ? "majority of the three base evaluations differs from the exact sign"
              : "some base evaluation differs from the exact sign")
      << "\n"
      << "; float width: binary" << static_cast<int>(config.width) << " (_ FloatingPoint "
      << fmt.exponent_bits << ' ' << fmt.significand_bits
      << "), rounding roundNearestTiesToEven, no fused operations\n"
      << "; intended theories: QF_FPA plus real arithmetic for the exact sign (fp.to_real);\n"
      << ";   declared as ALL for solver compatibility\n"
      << "; base p1 with spanning order (p1,p2,p3): u=p2-p1 v=p3-p1 w=d-p1\n"
      << ";   m1=vy*wz-vz*wy m2=vx*wz-vz*wx m3=vx*wy-vy*wx det=(ux*m1-uy*m2)+uz*m3\n"
      << "; sign convention: det[b-a, c-a, d-a] > 0 is Above (+1)\n"
      << "; search-space narrowing (set by --emin, --emax and --fix):\n"
      << ";   a, b, c coordinates: magnitude in [2^" << config.exponent_min << ", 2^"
      << config.exponent_max + 1 << ")\n"
      << ";   d coordinates: magnitude below 2^" << config.exponent_max + 2 << "\n";
  for (const auto& f : config.fixed) {
    out << ";   fixed " << f.name << " = " << to_hex(f.value) << "\n";
  }
  out << "(set-logic ALL)\n"
      << "(set-option :produce-models true)\n"
      << "(define-sort F () (_ FloatingPoint " << fmt.exponent_bits << ' '
      << fmt.significand_bits << "))\n";
  for (char p : {'a', 'b', 'c', 'd'}) {
    for (char axis : {'x', 'y', 'z'}) out << "(declare-const " << p << axis << " F)\n";
  }

  out << "(define-fun fsign ((x F)) Int (ite (fp.isZero x) 0 (ite (fp.isNegative x) (- 1) 1)))\n"
      << "(define-fun rsign ((x Real)) Int (ite (= x 0.0) 0 (ite (< x 0.0) (- 1) 1)))\n"
      << "(define-fun lo () F " << smt_fp_literal(lo, config.width) << ")\n"
      << "(define-fun hi () F " << smt_fp_literal(hi, config.width) << ")\n"
      << "(define-fun dhi () F " << smt_fp_literal(d_hi, config.width) << ")\n"
      << "(define-fun in_band ((x F)) Bool (and (fp.leq lo (fp.abs x)) (fp.lt (fp.abs x) hi)))\n"
      << "(define-fun below_dhi ((x F)) Bool (and (not (fp.isNaN x)) (fp.lt (fp.abs x) dhi)))\n";
  for (char p : {'a', 'b', 'c'}) {
    for (char axis : {'x', 'y', 'z'}) out << "(assert (in_band " << p << axis << "))\n";
  }
  for (char axis : {'x', 'y', 'z'}) out << "(assert (below_dhi d" << axis << "))\n";
  for (const auto& f : config.fixed) {
    out << "(assert (= " << f.name << ' ' << smt_fp_literal(f.value, config.width) << "))\n";
  }

  emit_float_det(out, "det1", 'a', 'b', 'c');
  emit_float_det(out, "det2", 'b', 'c', 'a');
  emit_float_det(out, "det3", 'c', 'a', 'b');
  out << "(define-fun s1 () Int (fsign det1))\n"
      << "(define-fun s2 () Int (fsign det2))\n"
      << "(define-fun s3 () Int (fsign det3))\n";

  out << "(define-fun rax () Real (fp.to_real ax)) (define-fun ray () Real (fp.to_real ay))"
         " (define-fun raz () Real (fp.to_real az))\n"
      << "(define-fun rbx () Real (fp.to_real bx)) (define-fun rby () Real (fp.to_real by))"
         " (define-fun rbz () Real (fp.to_real bz))\n"
      << "(define-fun rcx () Real (fp.to_real cx)) (define-fun rcy () Real (fp.to_real cy))"
         " (define-fun rcz () Real (fp.to_real cz))\n"
      << "(define-fun rdx () Real (fp.to_real dx)) (define-fun rdy () Real (fp.to_real dy))"
         " (define-fun rdz () Real (fp.to_real dz))\n"
      << "(define-fun exact_det () Real\n"
      << "  (let ((ux (- rbx rax)) (uy (- rby ray)) (uz (- rbz raz))\n"
      << "        (vx (- rcx rax)) (vy (- rcy ray)) (vz (- rcz raz))\n"
      << "        (wx (- rdx rax)) (wy (- rdy ray)) (wz (- rdz raz)))\n"
      << "  (+ (- (* ux (- (* vy wz) (* vz wy))) (* uy (- (* vx wz) (* vz wx))))"
         " (* uz (- (* vx wy) (* vy wx))))))\n"
      << "(define-fun se () Int (rsign exact_det))\n";

  if (config.mode == SearchMode::Majority) {
    out << "(define-fun tie () Bool (and (distinct s1 s2) (distinct s1 s3) (distinct s2 s3)))\n"
        << "(define-fun majority () Int (ite (or (= s1 s2) (= s1 s3)) s1 s2))\n"
        << "(assert (not tie))\n"
        << "(assert (distinct majority se))\n";
  } else {
    out << "(assert (or (distinct s1 se) (distinct s2 se) (distinct s3 se)))\n";
  }
  out << "(check-sat)\n"
      << "(get-model)\n";
}

}  // namespace numguard
