#ifndef CSPA_DATASET_HPP
#define CSPA_DATASET_HPP

// Labeled instance streams: LIBSVM-format parsing and serialization,
// synthetic four-Gaussian generation, unit-norm normalization, feature
// noise, and seeded shuffling. All operations are pure (input -> new
// value) or deterministic given a seed.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cspa {

using Vector = Eigen::VectorXd;

struct Instance {
  Vector features;
  int label = 0;  // class index in {1..K}
};

struct Dataset {
  std::vector<Instance> instances;
  int num_classes = 0;
  Eigen::Index dimension = 0;
  std::string name;

  std::size_t size() const { return instances.size(); }
};

namespace detail {

// SplitMix64, used to derive independent sub-seeds from one base seed.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Parses LIBSVM sparse text (`label idx:val idx:val ...`, 1-based indices).
// The dense dimension is the maximum index seen; distinct raw labels are
// remapped to {1..K} in ascending order. num_classes must be at least 3:
// the learner's analysis needs K >= 3 and binary streams are rejected here.
inline Dataset parse_libsvm(std::istream& in, int num_classes,
                            std::string name = "") {
  if (num_classes < 3) {
    throw std::invalid_argument(
        "parse_libsvm: num_classes must be >= 3, got " +
        std::to_string(num_classes));
  }
  std::vector<std::vector<std::pair<Eigen::Index, double>>> rows;
  std::vector<double> raw_labels;
  Eigen::Index max_index = 0;

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line
    std::size_t pos = 0;
    double label = 0.0;
    try {
      label = std::stod(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size()) {
      throw std::runtime_error("parse_libsvm: line " + std::to_string(line_no) +
                               ": bad label token '" + tok + "'");
    }
    std::vector<std::pair<Eigen::Index, double>> row;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) {
        throw std::runtime_error("parse_libsvm: line " +
                                 std::to_string(line_no) +
                                 ": expected idx:val, got '" + tok + "'");
      }
      long idx = 0;
      double val = 0.0;
      try {
        std::size_t p1 = 0, p2 = 0;
        idx = std::stol(tok.substr(0, colon), &p1);
        val = std::stod(tok.substr(colon + 1), &p2);
        if (p1 != colon || p2 != tok.size() - colon - 1) throw std::exception();
      } catch (const std::exception&) {
        throw std::runtime_error("parse_libsvm: line " +
                                 std::to_string(line_no) +
                                 ": bad feature token '" + tok + "'");
      }
      if (idx <= 0) {
        throw std::runtime_error("parse_libsvm: line " +
                                 std::to_string(line_no) +
                                 ": feature index must be positive, got " +
                                 std::to_string(idx));
      }
      max_index = std::max<Eigen::Index>(max_index, idx);
      row.emplace_back(idx, val);
    }
    rows.push_back(std::move(row));
    raw_labels.push_back(label);
  }

  std::map<double, int> remap;
  for (double l : raw_labels) remap.emplace(l, 0);
  if (static_cast<int>(remap.size()) > num_classes) {
    throw std::runtime_error(
        "parse_libsvm: found " + std::to_string(remap.size()) +
        " distinct labels but num_classes=" + std::to_string(num_classes));
  }
  int next = 1;
  for (auto& [raw, mapped] : remap) mapped = next++;

  Dataset ds;
  ds.num_classes = num_classes;
  ds.dimension = max_index;
  ds.name = std::move(name);
  ds.instances.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Instance inst;
    inst.features = Vector::Zero(max_index);
    for (const auto& [idx, val] : rows[r]) inst.features[idx - 1] = val;
    inst.label = remap.at(raw_labels[r]);
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

inline Dataset parse_libsvm(const std::string& text, int num_classes,
                            std::string name = "") {
  std::istringstream in(text);
  return parse_libsvm(in, num_classes, std::move(name));
}

// Writes the same sparse format back (zeros omitted, full double precision).
inline void serialize_libsvm(const Dataset& ds, std::ostream& out) {
  char buf[64];
  for (const Instance& inst : ds.instances) {
    out << inst.label;
    for (Eigen::Index j = 0; j < inst.features.size(); ++j) {
      if (inst.features[j] != 0.0) {
        std::snprintf(buf, sizeof(buf), " %lld:%.17g",
                      static_cast<long long>(j + 1), inst.features[j]);
        out << buf;
      }
    }
    out << '\n';
  }
}

// Scales every feature vector to unit Euclidean norm (R = 1 thereafter).
inline Dataset normalize(Dataset ds) {
  for (std::size_t i = 0; i < ds.instances.size(); ++i) {
    const double n = ds.instances[i].features.norm();
    if (n == 0.0) {
      throw std::runtime_error("normalize: instance " + std::to_string(i) +
                               " is the zero vector");
    }
    ds.instances[i].features /= n;
  }
  return ds;
}

// Four isotropic 2-d Gaussians at (1,1), (1,-1), (-1,1), (-1,-1) with
// per-axis standard deviation sigma; n_per_class samples per class,
// labels 1..4. Not normalized.
inline Dataset gen_four_gaussians(int n_per_class, double sigma,
                                  std::uint64_t seed) {
  if (n_per_class <= 0) {
    throw std::invalid_argument("gen_four_gaussians: n_per_class must be > 0");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("gen_four_gaussians: sigma must be > 0");
  }
  static constexpr double kCenters[4][2] = {
      {1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Dataset ds;
  ds.num_classes = 4;
  ds.dimension = 2;
  ds.name = "four-gaussians";
  ds.instances.reserve(4 * static_cast<std::size_t>(n_per_class));
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < n_per_class; ++i) {
      Instance inst;
      inst.features = Vector(2);
      inst.features[0] = kCenters[c][0] + noise(rng);
      inst.features[1] = kCenters[c][1] + noise(rng);
      inst.label = c + 1;
      ds.instances.push_back(std::move(inst));
    }
  }
  return ds;
}

// Adds independent N(0, sigma^2) to every feature of every instance.
// Intended to run before normalize so the unit-norm precondition of the
// learner stays exact.
inline Dataset add_feature_noise(Dataset ds, double sigma,
                                 std::uint64_t seed) {
  if (sigma < 0.0) {
    throw std::invalid_argument("add_feature_noise: sigma must be >= 0");
  }
  if (sigma == 0.0) return ds;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (Instance& inst : ds.instances) {
    for (Eigen::Index j = 0; j < inst.features.size(); ++j) {
      inst.features[j] += noise(rng);
    }
  }
  return ds;
}

// Deterministic permutation of the instance order.
inline Dataset shuffle(Dataset ds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(ds.instances.begin(), ds.instances.end(), rng);
  return ds;
}

}  // namespace cspa

#endif  // CSPA_DATASET_HPP
