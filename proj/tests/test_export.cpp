#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "ultraflat/export.hpp"
#include "ultraflat/generators.hpp"
#include "ultraflat/theorems.hpp"

using namespace ultraflat;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("fixed floating-point formatting", "[export]") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("trace CSV", "[export]") {
  FlattenerTrace tr;
  tr.eps_history = {0.5, 0.25};
  tr.iterations = 2;
  const auto l = lines(trace_csv(tr));
  REQUIRE(l.size() == 3);
  CHECK(l[0] == "iter,eps");
  CHECK(l[1] == "0,0.5");
  CHECK(l[2] == "1,0.25");
}

TEST_CASE("convergence table CSV, JSON and SVG", "[export]") {
  std::vector<SweepInput> in;
  for (std::size_t n : {31u, 63u}) in.push_back({n, random_unimodular(n, n), 0.5});
  const std::vector<TheoremId> ids{TheoremId::T22, TheoremId::T21};
  const std::vector<double> qs{1.0, 2.0};
  const auto tables = sweep_verify(in, ids, qs);

  const auto csv = convergence_csv(tables);
  const auto l = lines(csv);
  REQUIRE(l.size() == 1 + 3 * 2);
  CHECK(l[0].rfind("theorem,q,n,eps,lhs,rhs,ratio", 0) == 0);
  CHECK(l[1].rfind("T22,,31,0.5,", 0) == 0);
  CHECK(l[3].rfind("T21,1,31,", 0) == 0);
  CHECK(csv == convergence_csv(sweep_verify(in, ids, qs)));

  const auto j = convergence_json(tables);
  REQUIRE(j.size() == 3);
  CHECK(j[0]["theorem"] == "T22");
  CHECK(j[0]["q"].is_null());
  CHECK(j[1]["q"] == 1.0);
  CHECK(j[0]["rows"].size() == 2);
  CHECK(j[0]["trend"].contains("smoothed"));
  // Doubles survive the text round trip bit for bit.
  const auto back = nlohmann::ordered_json::parse(dump_json(j));
  CHECK(back[0]["rows"][1]["lhs"].get<double>() == tables[0].rows[1].lhs);

  const auto svg = ratio_plot_svg(tables, "test");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t polylines = 0;
  for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos) {
    ++polylines;
  }
  CHECK(polylines == 3);
  CHECK(svg.find("T21 q=2") != std::string::npos);
}

TEST_CASE("phase CSV and distribution JSON", "[export]") {
  const auto p = make_unimodular({1.0, 1.0});
  const auto prof = phase_profile(p, 33);
  const auto l = lines(phase_csv(prof));
  REQUIRE(l.size() == 34);
  CHECK(l[0] == "t,R,alpha,alpha_prime,beta");
  CHECK(l[1] == "0,2,0,0.5,0");

  const auto d = angular_speed_distribution(prof.alpha_prime, 1, default_probe_points());
  const auto j = distribution_json(d);
  CHECK(j["n"] == 1);
  CHECK(j["xs"].size() == 201);
  CHECK(j["measure"].size() == 201);
}

TEST_CASE("non-finite numbers become JSON null", "[export]") {
  FlatnessReport r;
  r.eps = std::numeric_limits<double>::infinity();
  CHECK(flatness_json(r)["eps"].is_null());
}
