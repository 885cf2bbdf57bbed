#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>

#include "nbbook/server.hpp"
#include "support/common.hpp"

namespace fs = std::filesystem;
using namespace nbbook;

namespace {

std::string overlay_bytes() {
  static const std::string b = serialize_overlay(
      analyze(testkit::load_fixture("study_houseprices.ipynb"), testkit::seed_catalog(), testkit::seed_patterns()).overlay);
  return b;
}

std::string section_of_cell_50() {
  for (const auto& ch : parse_overlay(overlay_bytes()).chapters) {
    for (std::size_t k = 0; k < ch.sections.size(); ++k) {
      if (ch.sections[k].cell_range.first == 50) return std::to_string(ch.number) + "." + std::to_string(k + 1);
    }
  }
  return "none";
}

}  // namespace

TEST(Server, OverlayAnnotationsExport) {
  const fs::path sidecar = fs::temp_directory_path() / ("nbbook-server-" + std::to_string(::getpid()) + ".annotations.json");
  fs::remove(sidecar);
  ServerConfig cfg;
  cfg.annotations_path = sidecar.string();
  OverlayServer server(overlay_bytes(), cfg);
  const int port = server.start();
  httplib::Client client("127.0.0.1", port);

  auto res = client.Get("/overlay");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, overlay_bytes());

  res = client.Get("/annotations");
  ASSERT_TRUE(res);
  EXPECT_EQ(nlohmann::json::parse(res->body), nlohmann::json::array());

  const std::string body =
      R"({"cell_display":50,"anchor":{"start_char":0,"end_char":10},"color":"Yellow",
          "comment":"needs further tuning","author":"P1","created_at":"2024-01-01T00:00:00Z"})";
  res = client.Post("/annotations", body, "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  EXPECT_EQ(nlohmann::json::parse(res->body)["id"], "ann-1");

  res = client.Get("/annotations");
  const auto listed = nlohmann::json::parse(res->body);
  ASSERT_EQ(listed.size(), 1u);
  EXPECT_EQ(listed[0]["comment"], "needs further tuning");
  EXPECT_EQ(load_store(testkit::read_file(sidecar)).annotations.size(), 1u);

  res = client.Post("/annotations",
                    R"({"cell_display":50,"anchor":{"start_char":0,"end_char":100000},"color":"Blue",
                        "created_at":"2024-01-01T00:00:00Z"})",
                    "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);
  EXPECT_EQ(nlohmann::json::parse(res->body)["error"], "AnchorOutOfBounds");
  EXPECT_EQ(server.annotations().annotations.size(), 1u);

  res = client.Post("/annotations", R"({"id":"ann-1","cell_display":50,"anchor":{"start_char":0,"end_char":1},
                                        "color":"Blue"})",
                    "application/json");
  EXPECT_EQ(res->status, 409);
  res = client.Post("/annotations", "not json", "application/json");
  EXPECT_EQ(res->status, 400);

  res = client.Get("/export?format=markdown&expand=" + section_of_cell_50());
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_NE(res->body.find("needs further tuning"), std::string::npos);
  const auto direct = export_document(parse_overlay(overlay_bytes()), server.annotations(),
                                      parse_expand_spec(parse_overlay(overlay_bytes()), section_of_cell_50()), ExportFormat::Markdown,
                                      ExportOptions{default_export_time(server.annotations()), "assets"});
  EXPECT_EQ(res->body, direct.document);

  res = client.Get("/export?format=pdf");
  EXPECT_EQ(res->status, 400);
  server.stop();

  OverlayServer reopened(overlay_bytes(), cfg);
  EXPECT_EQ(reopened.annotations().annotations.size(), 1u);
  fs::remove(sidecar);
}
