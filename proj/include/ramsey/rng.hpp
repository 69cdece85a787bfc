#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

#if defined(__AVX2__) || defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace ramsey {

/// SplitMix64 generator (Steele, Lea, Flood). Satisfies
/// UniformRandomBitGenerator so it plugs into <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Independent stream for (seed, path): the path index is mixed through one
/// SplitMix64 round so neighbouring paths start far apart.
inline SplitMix64 path_stream(std::uint64_t seed, std::uint64_t path) {
  SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (path + 1)));
  return SplitMix64(mix() ^ path);
}

namespace detail {

// 256-layer ziggurat for the standard normal (Marsaglia and Tsang 2000).
struct ZigguratTable {
  static constexpr int kLayers = 256;
  static constexpr double kR = 3.6541528853610088;       // start of the tail
  static constexpr double kArea = 0.00492867323399;      // area of each layer
  double x[kLayers + 1];
  double f[kLayers + 1];

  ZigguratTable() {
    x[0] = kArea / std::exp(-0.5 * kR * kR);
    x[1] = kR;
    for (int i = 2; i < kLayers; ++i)
      x[i] = std::sqrt(-2.0 * std::log(kArea / x[i - 1] + std::exp(-0.5 * x[i - 1] * x[i - 1])));
    x[kLayers] = 0.0;
    for (int i = 0; i <= kLayers; ++i) f[i] = std::exp(-0.5 * x[i] * x[i]);
  }

  static const ZigguratTable& get() {
    static const ZigguratTable t;
    return t;
  }
};

inline double unit_open(std::uint64_t b) {  // (0, 1)
  return (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
}

// [-1, 1) from the top 52 bits. Exact in every code path below, so scalar and
// SIMD builds produce the same numbers.
inline double symmetric_from_bits(std::uint64_t b) {
  return 2.0 * std::bit_cast<double>((b >> 12) | 0x3FF0000000000000ULL) - 3.0;
}

// Rectangle test of the ziggurat over a block: out[k] is the candidate and
// reject[k] is nonzero where it falls outside the inner rectangle.
inline void rectangle_step(const std::uint64_t* bits, const double* x, double* out, double* reject,
                           std::size_t n) {
  std::size_t k = 0;
#if defined(__AVX512F__) && defined(__AVX512DQ__)
  {
    const __m512i mask = _mm512_set1_epi64(0xFF), one = _mm512_set1_epi64(0x3FF0000000000000LL);
    const __m512d two = _mm512_set1_pd(2.0), three = _mm512_set1_pd(3.0), unit = _mm512_set1_pd(1.0);
    const std::size_t nv = n - n % 8;
    for (; k < nv; k += 8) {
      const __m512i b = _mm512_loadu_si512(bits + k);
      const __m512i i = _mm512_and_si512(b, mask);
      const __m512d u = _mm512_fmsub_pd(
          _mm512_castsi512_pd(_mm512_or_si512(_mm512_srli_epi64(b, 12), one)), two, three);
      const __m512d xx = _mm512_mul_pd(u, _mm512_i64gather_pd(i, x, 8));
      _mm512_storeu_pd(out + k, xx);
      const __mmask8 m = _mm512_cmp_pd_mask(_mm512_abs_pd(xx), _mm512_i64gather_pd(i, x + 1, 8), _CMP_GE_OQ);
      _mm512_storeu_pd(reject + k, _mm512_maskz_mov_pd(m, unit));
    }
  }
#elif defined(__AVX2__) && defined(__FMA__)
  {
    const __m256i mask = _mm256_set1_epi64x(0xFF), one = _mm256_set1_epi64x(0x3FF0000000000000LL);
    const __m256d two = _mm256_set1_pd(2.0), three = _mm256_set1_pd(3.0), sign = _mm256_set1_pd(-0.0),
                  unit = _mm256_set1_pd(1.0);
    const std::size_t nv = n - n % 4;
    for (; k < nv; k += 4) {
      const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + k));
      const __m256i i = _mm256_and_si256(b, mask);
      const __m256d u = _mm256_fmsub_pd(
          _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(b, 12), one)), two, three);
      const __m256d xx = _mm256_mul_pd(u, _mm256_i64gather_pd(x, i, 8));
      _mm256_storeu_pd(out + k, xx);
      const __m256d m = _mm256_cmp_pd(_mm256_andnot_pd(sign, xx), _mm256_i64gather_pd(x + 1, i, 8), _CMP_GE_OQ);
      _mm256_storeu_pd(reject + k, _mm256_and_pd(m, unit));
    }
  }
#endif
  for (; k < n; ++k) {
    const std::size_t i = bits[k] & 0xFF;
    const double xx = symmetric_from_bits(bits[k]) * x[i];
    out[k] = xx;
    reject[k] = std::abs(xx) >= x[i + 1] ? 1.0 : 0.0;
  }
}

}  // namespace detail

/// Standard normals from a 256-layer ziggurat, produced in blocks: the
/// rectangle test runs over the whole block and only the rare rejected slots
/// fall back to the wedge/tail step. The sequence depends only on the stream.
class NormalStream {
 public:
  static constexpr std::size_t kBlock = 512;

  explicit NormalStream(SplitMix64 gen) : gen_(gen), zt_(&detail::ZigguratTable::get()) {}

  double next() {
    if (pos_ == kBlock) refill();
    return buf_[pos_++];
  }

  /// Writes n normals to out.
  void fill(double* out, std::size_t n) {
    while (n > 0) {
      if (pos_ == kBlock) refill();
      const std::size_t k = std::min(n, kBlock - pos_);
      std::copy(buf_.data() + pos_, buf_.data() + pos_ + k, out);
      pos_ += k;
      out += k;
      n -= k;
    }
  }

 private:
  void refill() {
    for (std::size_t k = 0; k < kBlock; ++k) bits_[k] = gen_();
    detail::rectangle_step(bits_.data(), zt_->x, buf_.data(), reject_.data(), kBlock);
    for (std::size_t k = 0; k < kBlock; ++k)
      if (reject_[k] != 0.0) buf_[k] = slow(bits_[k]);
    pos_ = 0;
  }

  // Wedge or tail step for a draw that failed the rectangle test; a rejected
  // wedge point restarts with fresh bits.
  double slow(std::uint64_t b) {
    const auto& t = *zt_;
    for (;;) {
      const unsigned i = static_cast<unsigned>(b & 0xFF);
      const double u = detail::symmetric_from_bits(b);
      const double xx = u * t.x[i];
      if (std::abs(xx) < t.x[i + 1]) return xx;
      if (i == 0) {
        double a, e;
        do {
          a = -std::log(detail::unit_open(gen_())) / t.kR;
          e = -std::log(detail::unit_open(gen_()));
        } while (e + e < a * a);
        return u > 0.0 ? t.kR + a : -(t.kR + a);
      }
      const double y = t.f[i] + detail::unit_open(gen_()) * (t.f[i + 1] - t.f[i]);
      if (y < std::exp(-0.5 * xx * xx)) return xx;
      b = gen_();
    }
  }

  SplitMix64 gen_;
  const detail::ZigguratTable* zt_;
  alignas(64) std::array<double, kBlock> buf_{};
  alignas(64) std::array<std::uint64_t, kBlock> bits_{};
  alignas(64) std::array<double, kBlock> reject_{};
  std::size_t pos_ = kBlock;
};

}  // namespace ramsey
