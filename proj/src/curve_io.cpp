#include "mu3/curve_io.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <memory>

#include "mu3/errors.hpp"

namespace mu3 {

using nlohmann::json;

json link_to_json(const Link& link, int n_samples) {
  json samples = json::array();
  for (const auto& c : link.components) {
    json rows = json::array();
    for (int j = 0; j < n_samples; ++j) {
      const S3Point p = c(kTwoPi * j / n_samples);
      rows.push_back({p.w, p.x, p.y, p.z});
    }
    samples.push_back(std::move(rows));
  }
  return {{"name", link.name},
          {"n_components", link.size()},
          {"n_samples", n_samples},
          {"samples", std::move(samples)}};
}

namespace {

struct Interpolant {
  // Real trigonometric coefficients per coordinate: a_k cos(k t) + b_k sin(k t).
  std::array<std::vector<double>, 4> a, b;
  int n = 0;

  Vec4 eval(double t) const {
    Vec4 out = Vec4::Zero();
    const int half = n / 2;
    for (int c = 0; c < 4; ++c) {
      double s = a[c][0];
      for (int k = 1; k <= half; ++k) {
        s += a[c][k] * std::cos(k * t) + b[c][k] * std::sin(k * t);
      }
      out[c] = s;
    }
    return out;
  }

  Vec4 deriv(double t) const {
    Vec4 out = Vec4::Zero();
    const int half = n / 2;
    for (int c = 0; c < 4; ++c) {
      double s = 0.0;
      for (int k = 1; k <= half; ++k) {
        s += k * (-a[c][k] * std::sin(k * t) + b[c][k] * std::cos(k * t));
      }
      out[c] = s;
    }
    return out;
  }
};

}  // namespace

Curve interpolate_samples(std::vector<Vec4> samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 4) throw IoError("curve needs at least 4 samples");
  auto ip = std::make_shared<Interpolant>();
  ip->n = n;
  const int half = n / 2;
  for (int c = 0; c < 4; ++c) {
    ip->a[c].assign(half + 1, 0.0);
    ip->b[c].assign(half + 1, 0.0);
    for (int k = 0; k <= half; ++k) {
      double sa = 0.0, sb = 0.0;
      for (int j = 0; j < n; ++j) {
        const double t = kTwoPi * j / n;
        sa += samples[j][c] * std::cos(k * t);
        sb += samples[j][c] * std::sin(k * t);
      }
      // Nyquist term of an even-length series carries half weight.
      const double w = (k == 0 || (n % 2 == 0 && k == half)) ? 1.0 / n : 2.0 / n;
      ip->a[c][k] = w * sa;
      ip->b[c][k] = (n % 2 == 0 && k == half) ? 0.0 : w * sb;
    }
  }
  // Value is renormalized; the derivative is projected onto the tangent space.
  return Curve(
      [ip](double t) { return UnitQuaternion::from_vector(ip->eval(t)).normalized(); },
      [ip](double t) {
        const Vec4 v = ip->eval(t);
        const double r = v.norm();
        const Vec4 u = v / r;
        const Vec4 d = ip->deriv(t);
        return Vec4((d - u * u.dot(d)) / r);
      });
}

Link link_from_json(const json& doc) {
  try {
    Link link;
    link.name = doc.value("name", std::string("unnamed"));
    const auto& samples = doc.at("samples");
    if (!samples.is_array()) throw IoError("'samples' must be an array");
    const std::size_t k = doc.value("n_components", samples.size());
    if (k != samples.size()) throw IoError("n_components does not match samples");
    for (const auto& comp : samples) {
      std::vector<Vec4> rows;
      for (const auto& r : comp) {
        if (!r.is_array() || r.size() != 4) throw IoError("sample rows must be [w,x,y,z]");
        Vec4 v(r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>());
        if (std::abs(v.norm() - 1.0) > 1e-6) throw IoError("sample not on S^3");
        rows.push_back(v);
      }
      if (doc.contains("n_samples") && doc["n_samples"].get<std::size_t>() != rows.size()) {
        throw IoError("n_samples does not match sample rows");
      }
      link.components.push_back(interpolate_samples(std::move(rows)));
    }
    return link;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed curve document: ") + e.what());
  }
}

void save_link(const std::filesystem::path& path, const Link& link, int n_samples) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << link_to_json(link, n_samples).dump(1) << '\n';
}

Link load_link(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
  return link_from_json(doc);
}

}  // namespace mu3
