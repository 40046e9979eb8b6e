#include "skintone/ingestion.hpp"
#include "skintone/ita.hpp"
#include "skintone/nnmf.hpp"
#include "skintone/random.hpp"
#include "skintone/sreds.hpp"
#include "skintone/synth.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace skintone;

namespace {

PixelPatch skin_patch(std::size_t n, double specular, std::uint64_t seed) {
  return render_patch({Vec3(0.6, 0.42, 0.33), Vec3(1.0, 0.95, 0.9), specular, 0.1, 0.005, n, seed});
}

void BM_Nnmf(benchmark::State& state) {
  const auto patch = skin_patch(static_cast<std::size_t>(state.range(0)), 0.2, 1);
  ColorMatrix V(3, static_cast<Eigen::Index>(patch.size()));
  for (std::size_t j = 0; j < patch.size(); ++j) V.col(static_cast<Eigen::Index>(j)) = to_linear(patch.pixels[j]);
  for (auto _ : state) benchmark::DoNotOptimize(nnmf(V));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Nnmf)->Arg(256)->Arg(4096)->Arg(65536);

void BM_DecomposePatch(benchmark::State& state) {
  const auto patch = skin_patch(static_cast<std::size_t>(state.range(0)), 0.2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(extract_diffuse(patch));
}
BENCHMARK(BM_DecomposePatch)->Arg(256)->Arg(4096);

void BM_FitSreds(benchmark::State& state) {
  Rng rng(3);
  std::vector<DiffuseFeature> feats;
  for (int64_t i = 0; i < state.range(0); ++i) {
    const double s = rng.uniform(0.05, 1.0);
    feats.push_back({Vec3(0.55 * s, 0.35 * s, 0.25 * s) + Vec3::Constant(0.01 * rng.normal())});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_sreds(feats, {}, "bench"));
}
BENCHMARK(BM_FitSreds)->Arg(200)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ExtractPatch(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  RgbImage image(size, size, {180, 130, 110});
  RegionPolygon poly;
  const int verts = 24;
  for (int k = 0; k < verts; ++k) {
    const double t = 2.0 * std::numbers::pi * k / verts;
    const double r = (k % 2 ? 0.45 : 0.3) * size;
    poly.vertices.push_back({static_cast<int>(size / 2 + r * std::cos(t)), static_cast<int>(size / 2 + r * std::sin(t))});
  }
  for (auto _ : state) benchmark::DoNotOptimize(extract_patch(image, poly));
}
BENCHMARK(BM_ExtractPatch)->Arg(256)->Arg(1024);

void BM_FaceIta(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<PixelPatch> patches;
  for (std::uint64_t r = 0; r < 3; ++r) patches.push_back(skin_patch(n, 0.1, 10 + r));
  for (auto _ : state) benchmark::DoNotOptimize(face_ita(patches));
}
BENCHMARK(BM_FaceIta)->Arg(256)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
