#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tsunet/data/augment.hpp"
#include "tsunet/data/image.hpp"
#include "tsunet/gvf/gvf.hpp"
#include "tsunet/gvf/gvf_io.hpp"

namespace tsunet {

template <typename T>
struct Sample {
  std::string id;
  Tensor<T> image;                 // [C,H,W] in [0,1]
  std::vector<std::uint8_t> mask;  // H*W class indices
  std::size_t height = 0, width = 0;
  std::optional<GvfField<T>> gvf;  // cached vector-stream input
};

struct ManifestEntry {
  std::string split;  // train | val | test
  std::string id;
};

// Dataset directory layout:
//   <root>/images/<id>.png|pgm   <root>/masks/<id>.png   <root>/gvf/<id>.gvf (optional)
//   <root>/manifest.tsv
struct DatasetManifest {
  std::string root;
  std::size_t num_classes = 2;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;

  std::vector<std::string> ids(const std::string& split) const {
    std::vector<std::string> out;
    for (const auto& e : entries)
      if (e.split == split) out.push_back(e.id);
    return out;
  }
};

inline std::string manifest_path(const std::string& root) {
  return (std::filesystem::path(root) / "manifest.tsv").string();
}

inline void save_manifest(const DatasetManifest& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << "# tsunet-manifest v1\n";
  os << "# seed\t" << m.seed << "\n";
  os << "# num_classes\t" << m.num_classes << "\n";
  for (const auto& e : m.entries) os << e.split << "\t" << e.id << "\n";
  if (!os) throw DataError("write failed: " + path);
}

inline DatasetManifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open manifest: " + path);
  DatasetManifest m;
  m.root = std::filesystem::path(path).parent_path().string();
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "seed") hs >> m.seed;
      if (key == "num_classes") hs >> m.num_classes;
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("malformed manifest line: " + line);
    m.entries.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  if (m.entries.empty()) throw DataError("empty manifest: " + path);
  return m;
}

// Deterministic shuffle + split with explicit per-split sizes.
inline DatasetManifest split_dataset_counts(std::vector<std::string> ids,
                                            const std::array<std::size_t, 3>& counts,
                                            std::uint64_t seed) {
  if (counts[0] + counts[1] + counts[2] != ids.size())
    throw DataError("split_dataset: counts sum to " +
                    std::to_string(counts[0] + counts[1] + counts[2]) + ", have " +
                    std::to_string(ids.size()) + " ids");
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  DatasetManifest m;
  m.seed = seed;
  const char* names[3] = {"train", "val", "test"};
  std::size_t at = 0;
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t i = 0; i < counts[s]; ++i) m.entries.push_back({names[s], ids[at++]});
  return m;
}

// Fractions must sum to 1; sizes floor, the remainder goes to train.
inline DatasetManifest split_dataset(std::vector<std::string> ids,
                                     const std::array<double, 3>& fractions,
                                     std::uint64_t seed) {
  const double total = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(total - 1.0) > 1e-9)
    throw DataError("split_dataset: fractions must sum to 1, got " + std::to_string(total));
  std::array<std::size_t, 3> counts{};
  for (std::size_t i = 0; i < 3; ++i)
    counts[i] = static_cast<std::size_t>(fractions[i] * static_cast<double>(ids.size()));
  const std::size_t assigned = counts[0] + counts[1] + counts[2];
  counts[0] += ids.size() - assigned;
  return split_dataset_counts(std::move(ids), counts, seed);
}

template <typename T>
Sample<T> load_sample(const std::string& image_path, const std::string& mask_path,
                      std::size_t num_classes) {
  const ImageU8 img = load_image(image_path);
  const ImageU8 msk = load_image(mask_path);
  if (img.width != msk.width || img.height != msk.height)
    throw DataError("image/mask size mismatch: " + image_path + " is " +
                    std::to_string(img.width) + "x" + std::to_string(img.height) + ", " +
                    mask_path + " is " + std::to_string(msk.width) + "x" +
                    std::to_string(msk.height));
  Sample<T> s;
  s.id = std::filesystem::path(image_path).stem().string();
  s.image = image_to_tensor<T>(img);
  s.mask = mask_from_image(msk, num_classes);
  s.height = img.height;
  s.width = img.width;
  return s;
}

inline std::string find_image_path(const std::string& root, const std::string& id) {
  namespace fs = std::filesystem;
  for (const char* ext : {".png", ".pgm"}) {
    const fs::path p = fs::path(root) / "images" / (id + ext);
    if (fs::exists(p)) return p.string();
  }
  throw DataError("no image found for id '" + id + "' under " + root + "/images");
}

inline std::string mask_path_for(const std::string& root, const std::string& id) {
  return (std::filesystem::path(root) / "masks" / (id + ".png")).string();
}

inline std::string gvf_cache_path(const std::string& root, const std::string& id) {
  return (std::filesystem::path(root) / "gvf" / (id + ".gvf")).string();
}

// Loads one split; picks up cached GVF fields when present on disk.
template <typename T>
std::vector<Sample<T>> load_split(const DatasetManifest& m, const std::string& split) {
  std::vector<Sample<T>> out;
  for (const std::string& id : m.ids(split)) {
    Sample<T> s =
        load_sample<T>(find_image_path(m.root, id), mask_path_for(m.root, id), m.num_classes);
    s.id = id;
    const std::string cache = gvf_cache_path(m.root, id);
    if (std::filesystem::exists(cache)) {
      const GvfField<float> f = load_gvf<float>(cache);
      GvfField<T> cast;
      cast.u = f.u.template cast<T>();
      cast.v = f.v.template cast<T>();
      cast.params = f.params;
      s.gvf = std::move(cast);
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Applies a geometric op to image+mask. The cached GVF is recomputed from the
// transformed image by default (correct vector orientation); with
// recompute_gvf=false an existing field is transformed instead.
template <typename T>
Sample<T> augment_sample(const Sample<T>& sample, AugmentOp op, bool recompute_gvf,
                         const GvfParams& params,
                         GvfNormalize normalize = GvfNormalize::max_magnitude) {
  Sample<T> out;
  out.id = sample.id;
  out.image = transform_chw(sample.image, op);
  out.mask = transform_mask(sample.mask, sample.height, sample.width, op);
  out.height = sample.height;
  out.width = sample.width;
  if (recompute_gvf) {
    out.gvf = compute_gvf(luma_plane(out.image), params, normalize);
  } else if (sample.gvf) {
    out.gvf = transform_gvf(*sample.gvf, op);
  }
  return out;
}

// Ensures a sample carries its vector-stream input.
template <typename T>
void ensure_gvf(Sample<T>& sample, const GvfParams& params, GvfNormalize normalize) {
  if (!sample.gvf) sample.gvf = compute_gvf(luma_plane(sample.image), params, normalize);
}

}  // namespace tsunet
