#include "gmc/serialize.hpp"

#include <cmath>

namespace gmc {

namespace {

std::function<double(const Point&, const Point&)> registry_fn(const std::string& name,
                                                              const json& params) {
  if (name == "zero") return [](const Point&, const Point&) { return 0.0; };
  if (name == "constant") {
    const double c = params.value("value", 0.0);
    return [c](const Point&, const Point&) { return c; };
  }
  if (name == "gaussian_bump") {
    const double amp = params.value("amp", 1.0);
    const double scale = params.value("scale", 1.0);
    return [amp, scale](const Point& x, const Point& y) {
      const double r = dist(x, y);
      return amp * std::exp(-r * r / (2.0 * scale * scale));
    };
  }
  throw ConfigError("unknown composite kernel function: " + name);
}

}  // namespace

json kernel_to_json(const KernelDescriptor& k) {
  json j;
  j["d"] = k.d;
  switch (k.variant) {
    case KernelDescriptor::Variant::LExact:
      j["variant"] = "l_exact";
      j["L"] = k.L;
      break;
    case KernelDescriptor::Variant::Reference:
      j["variant"] = "reference";
      break;
    case KernelDescriptor::Variant::Composite:
      j["variant"] = "composite";
      j["f"] = k.f_name;
      break;
  }
  if (k.domain_box) j["domain"] = box_to_json(*k.domain_box, k.d);
  return j;
}

KernelDescriptor kernel_from_json(const json& j) {
  if (!j.contains("variant")) throw ConfigError("kernel: missing variant");
  const std::string variant = j.at("variant");
  const int d = j.value("d", 1);
  KernelDescriptor k;
  if (variant == "l_exact") {
    k = KernelDescriptor::l_exact(j.value("L", 0.0), d);
  } else if (variant == "reference") {
    k = KernelDescriptor::reference(d);
  } else if (variant == "composite") {
    const std::string fname = j.value("f", "zero");
    k = KernelDescriptor::composite(d, registry_fn(fname, j.value("params", json::object())),
                                    fname);
  } else {
    throw ConfigError("kernel: unknown variant " + variant);
  }
  if (j.contains("domain")) k.domain_box = box_from_json(j.at("domain"));
  return k;
}

json box_to_json(const Box& b, int d) {
  json lo = json::array(), hi = json::array();
  for (int i = 0; i < d; ++i) {
    lo.push_back(b.lo[i]);
    hi.push_back(b.hi[i]);
  }
  return json{{"lo", lo}, {"hi", hi}};
}

Box box_from_json(const json& j, int* d_out) {
  const auto& lo = j.at("lo");
  const auto& hi = j.at("hi");
  if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size() || lo.empty() || lo.size() > 3)
    throw ConfigError("box: lo/hi must be arrays of equal length 1..3");
  Box b;
  const int d = static_cast<int>(lo.size());
  b.lo.dim = b.hi.dim = d;
  for (int i = 0; i < d; ++i) {
    b.lo[i] = lo.at(static_cast<size_t>(i)).get<double>();
    b.hi[i] = hi.at(static_cast<size_t>(i)).get<double>();
  }
  if (d_out) *d_out = d;
  return b;
}

json set_to_json(const SetSpec& s, int d) {
  json boxes = json::array(), balls = json::array();
  for (const auto& b : s.boxes) boxes.push_back(box_to_json(b, d));
  for (const auto& b : s.balls) {
    json c = json::array();
    for (int i = 0; i < d; ++i) c.push_back(b.center[i]);
    balls.push_back(json{{"center", c}, {"radius", b.radius}});
  }
  return json{{"boxes", boxes}, {"balls", balls}};
}

SetSpec set_from_json(const json& j) {
  SetSpec s;
  for (const auto& b : j.value("boxes", json::array())) s.boxes.push_back(box_from_json(b));
  for (const auto& b : j.value("balls", json::array())) {
    const auto& c = b.at("center");
    Ball ball;
    ball.center.dim = static_cast<int>(c.size());
    for (size_t i = 0; i < c.size() && i < 3; ++i)
      ball.center[static_cast<int>(i)] = c.at(i).get<double>();
    ball.radius = b.at("radius").get<double>();
    if (ball.radius <= 0) throw ConfigError("ball: radius > 0 required");
    s.balls.push_back(ball);
  }
  if (s.empty()) throw ConfigError("set: at least one box or ball required");
  return s;
}

json density_to_json(const DensitySpec& g) {
  switch (g.kind) {
    case DensitySpec::Kind::Constant:
      return json{{"type", "constant"}, {"c", g.c0}};
    case DensitySpec::Kind::Affine:
      return json{{"type", "affine"}, {"c", g.c0}, {"grad", g.grad}};
    case DensitySpec::Kind::Custom:
      return json{{"type", "custom"}};
  }
  return {};
}

DensitySpec density_from_json(const json& j) {
  const std::string type = j.value("type", "constant");
  if (type == "constant") return DensitySpec::constant(j.value("c", 1.0));
  if (type == "affine") {
    std::array<double, 3> grad{0, 0, 0};
    if (j.contains("grad")) {
      const auto& g = j.at("grad");
      for (size_t i = 0; i < g.size() && i < 3; ++i) grad[i] = g.at(i).get<double>();
    }
    return DensitySpec::affine(j.value("c", 0.0), grad);
  }
  throw ConfigError("density: unknown type " + type);
}

json grid_to_json(const GridSpec& g) {
  return json{{"box", box_to_json(g.box, g.d)}, {"spacing", g.spacing}, {"d", g.d}};
}

GridSpec grid_from_json(const json& j) {
  int d = 0;
  const Box box = box_from_json(j.at("box"), &d);
  if (j.contains("d")) d = j.at("d").get<int>();
  const double spacing = j.at("spacing").get<double>();
  return GridSpec::regular(d, box, spacing);
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects key=value: " + assignment);
  const std::string keypath = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  json* node = &config;
  size_t pos = 0;
  while (true) {
    const auto dot = keypath.find('.', pos);
    const std::string key = keypath.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (key.empty()) throw ConfigError("--set: empty key segment in " + keypath);
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
      return;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

}  // namespace gmc
