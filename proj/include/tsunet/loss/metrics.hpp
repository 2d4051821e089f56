#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsunet/core/error.hpp"

namespace tsunet {

namespace detail {

struct Overlap {
  std::size_t inter = 0, pred = 0, target = 0;
};

inline Overlap class_overlap(const std::vector<std::uint8_t>& pred,
                             const std::vector<std::uint8_t>& target, std::uint8_t cls) {
  if (pred.size() != target.size()) throw ShapeError("metrics: mask size mismatch");
  Overlap o;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == cls, t = target[i] == cls;
    o.inter += p && t;
    o.pred += p;
    o.target += t;
  }
  return o;
}

}  // namespace detail

// Intersection-over-union (Jaccard). Both masks empty -> 1 by convention: a
// correct all-background prediction is not penalized.
inline double iou(const std::vector<std::uint8_t>& pred,
                  const std::vector<std::uint8_t>& target, std::uint8_t cls = 1) {
  const auto o = detail::class_overlap(pred, target, cls);
  const std::size_t uni = o.pred + o.target - o.inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(o.inter) / static_cast<double>(uni);
}

// Dice score 2|A∩B| / (|A|+|B|); both empty -> 1.
inline double dsc(const std::vector<std::uint8_t>& pred,
                  const std::vector<std::uint8_t>& target, std::uint8_t cls = 1) {
  const auto o = detail::class_overlap(pred, target, cls);
  if (o.pred + o.target == 0) return 1.0;
  return 2.0 * static_cast<double>(o.inter) / static_cast<double>(o.pred + o.target);
}

struct Stat {
  double mean = 0, stddev = 0;
};

inline Stat mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  double m = 0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double var = 0;
  for (double x : xs) var += (x - m) * (x - m);
  var /= static_cast<double>(xs.size());  // population
  return {m, std::sqrt(var)};
}

struct ClassMetrics {
  std::uint8_t cls = 1;
  Stat iou, dsc;
};

// Per-foreground-class IoU/DSC with mean +/- std across images, plus the
// macro average (mean over foreground classes per image, then pooled).
struct MetricsReport {
  std::size_t num_classes = 2;
  std::size_t num_images = 0;
  std::vector<ClassMetrics> per_class;  // classes 1..num_classes-1
  Stat macro_iou, macro_dsc;
  bool post_processed = false;

  std::string to_text() const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "images\t" << num_images << "\n";
    os << "classes\t" << num_classes << "\n";
    os << "post_processed\t" << (post_processed ? "yes" : "no") << "\n";
    for (const auto& c : per_class)
      os << "class_" << int(c.cls) << "\tiou\t" << c.iou.mean << "\t+-\t" << c.iou.stddev
         << "\tdsc\t" << c.dsc.mean << "\t+-\t" << c.dsc.stddev << "\n";
    os << "macro\tiou\t" << macro_iou.mean << "\t+-\t" << macro_iou.stddev << "\tdsc\t"
       << macro_dsc.mean << "\t+-\t" << macro_dsc.stddev << "\n";
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json per;
    for (const auto& c : per_class)
      per.push_back({{"class", c.cls},
                     {"iou", {{"mean", c.iou.mean}, {"std", c.iou.stddev}}},
                     {"dsc", {{"mean", c.dsc.mean}, {"std", c.dsc.stddev}}}});
    return {{"images", num_images},
            {"classes", num_classes},
            {"post_processed", post_processed},
            {"per_class", per},
            {"macro",
             {{"iou", {{"mean", macro_iou.mean}, {"std", macro_iou.stddev}}},
              {"dsc", {{"mean", macro_dsc.mean}, {"std", macro_dsc.stddev}}}}}};
  }
};

inline MetricsReport compute_report(const std::vector<std::vector<std::uint8_t>>& preds,
                                    const std::vector<std::vector<std::uint8_t>>& targets,
                                    std::size_t num_classes, bool post_processed = false) {
  if (preds.size() != targets.size())
    throw ShapeError("compute_report: pred/target count mismatch");
  if (num_classes < 2) throw ShapeError("compute_report: need >= 2 classes");
  MetricsReport r;
  r.num_classes = num_classes;
  r.num_images = preds.size();
  r.post_processed = post_processed;

  std::vector<double> macro_iou_per_image, macro_dsc_per_image;
  std::vector<std::vector<double>> iou_per_class(num_classes), dsc_per_class(num_classes);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    double miou = 0, mdsc = 0;
    for (std::size_t c = 1; c < num_classes; ++c) {
      const double ji = iou(preds[i], targets[i], static_cast<std::uint8_t>(c));
      const double di = dsc(preds[i], targets[i], static_cast<std::uint8_t>(c));
      iou_per_class[c].push_back(ji);
      dsc_per_class[c].push_back(di);
      miou += ji;
      mdsc += di;
    }
    macro_iou_per_image.push_back(miou / static_cast<double>(num_classes - 1));
    macro_dsc_per_image.push_back(mdsc / static_cast<double>(num_classes - 1));
  }
  for (std::size_t c = 1; c < num_classes; ++c)
    r.per_class.push_back({static_cast<std::uint8_t>(c), mean_std(iou_per_class[c]),
                           mean_std(dsc_per_class[c])});
  r.macro_iou = mean_std(macro_iou_per_image);
  r.macro_dsc = mean_std(macro_dsc_per_image);
  return r;
}

}  // namespace tsunet
