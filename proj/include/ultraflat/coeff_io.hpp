#pragma once

// Coefficient file format:  {"n": <int>, "coeffs": [[re, im], ...]}

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ultraflat/poly_core.hpp"
#include "ultraflat/report.hpp"

namespace ultraflat {

inline nlohmann::ordered_json coefficients_to_json(std::span<const Complex> c) {
  nlohmann::ordered_json j;
  j["n"] = c.size() - 1;
  auto arr = nlohmann::ordered_json::array();
  // Adding +0.0 folds negative zero so files do not carry "-0.0".
  for (const Complex& z : c) arr.push_back({z.real() + 0.0, z.imag() + 0.0});
  j["coeffs"] = std::move(arr);
  return j;
}

// Parses and validates; modulus violations raise UnimodularityError.
inline UnimodularPolynomial unimodular_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("coeffs")) {
    throw std::invalid_argument("coefficient JSON needs keys \"n\" and \"coeffs\"");
  }
  const auto n = j.at("n").get<long long>();
  const auto& arr = j.at("coeffs");
  if (n < 0 || !arr.is_array() ||
      arr.size() != static_cast<std::size_t>(n) + 1) {
    throw std::invalid_argument("coefficient JSON: expected n+1 coefficients");
  }
  std::vector<Complex> c;
  c.reserve(arr.size());
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2) {
      throw std::invalid_argument("coefficient JSON: entries must be [re, im]");
    }
    c.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return make_unimodular(std::move(c));
}

inline UnimodularPolynomial read_unimodular(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return unimodular_from_json(j);
}

inline void write_coefficients(const std::filesystem::path& path,
                               std::span<const Complex> c) {
  write_file_atomically(path, coefficients_to_json(c).dump(1) + "\n");
}

}  // namespace ultraflat
