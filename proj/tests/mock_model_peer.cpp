// Stand-in model server speaking the line-delimited JSON protocol on stdio.
// Modes: uniform, knn, bad-sum, bad-id, bad-width, garbage, exit, hang.

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "timexplain/io.hpp"
#include "timexplain/models.hpp"
#include "timexplain/protocol.hpp"

using namespace timexplain;

int main(int argc, char** argv) {
  CLI::App app{"mock model peer"};
  std::string mode = "uniform";
  std::string classes_text = "A,B";
  std::string train_path;
  std::size_t k = 3;
  app.add_option("--mode", mode);
  app.add_option("--classes", classes_text);
  app.add_option("--train", train_path);
  app.add_option("--k", k);
  CLI11_PARSE(app, argc, argv);

  std::optional<models::KnnModel> knn;
  std::vector<ClassId> classes;
  if (mode == "knn") {
    knn.emplace(io::read_ucr(train_path), k);
    classes = knn->classes();
  } else {
    std::size_t start = 0;
    for (;;) {
      const auto comma = classes_text.find(',', start);
      classes.push_back(classes_text.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }

  std::cout << protocol::encode_handshake(classes) << std::endl;
  std::string line;
  while (std::getline(std::cin, line)) {
    const auto request = protocol::decode_request(line);
    if (mode == "exit") return 0;
    if (mode == "hang") {
      std::this_thread::sleep_for(std::chrono::seconds(30));
      return 0;
    }
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    std::vector<TimeSeries> batch;
    for (auto& s : request.series) batch.emplace_back(std::move(s));
    models::ProbabilityMatrix probs(batch.size(), classes.size());
    if (knn) {
      probs = knn->predict(batch);
    } else {
      for (std::size_t r = 0; r < batch.size(); ++r) {
        for (std::size_t c = 0; c < classes.size(); ++c) {
          probs(r, c) = 1.0 / static_cast<double>(classes.size());
          if (mode == "bad-sum") probs(r, c) *= 0.9;
        }
      }
    }
    if (mode == "bad-width") probs = models::ProbabilityMatrix(batch.size(), classes.size() + 1);
    const auto id = mode == "bad-id" ? request.id + 1 : request.id;
    std::cout << protocol::encode_response(id, probs) << std::endl;
  }
  return 0;
}
