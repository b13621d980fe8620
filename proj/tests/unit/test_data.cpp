#include <cmath>
#include <fstream>
#include <map>

#include "doctest.h"
#include "hargan/core/errors.hpp"
#include "hargan/core/io.hpp"
#include "hargan/data/dataset_io.hpp"
#include "hargan/data/readers.hpp"
#include "hargan/data/toy_corpus.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace hargan;
using namespace hargan::data;
using hargan::testing::scratch_dir;

namespace {

std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

DatasetProfile small_profile(std::size_t C, std::size_t L, std::vector<int> activities = {1, 2, 3}) {
  DatasetProfile p;
  p.name = "small";
  p.channels = C;
  p.length = L;
  p.sample_rate = 50.0;
  for (std::size_t c = 0; c < C; ++c) p.channel_names.push_back("ch_" + std::to_string(c));
  p.activity_ids = std::move(activities);
  return p;
}

RecordStream ramp_stream(int subject, std::size_t T, std::size_t C, int label) {
  RecordStream s;
  s.subject_id = subject;
  s.sample_rate = 50.0;
  for (std::size_t c = 0; c < C; ++c) {
    s.channel_names.push_back("ch_" + std::to_string(c));
    std::vector<double> v(T);
    for (std::size_t t = 0; t < T; ++t) v[t] = static_cast<double>(c * 1000 + t);
    s.channels.push_back(std::move(v));
  }
  s.labels.assign(T, label);
  return s;
}

WindowedDataset random_dataset(std::uint64_t seed, std::size_t C = 2, std::size_t L = 10) {
  Rng rng(seed);
  std::vector<RecordStream> streams;
  for (int s = 1; s <= 3; ++s) streams.push_back(oracle::random_stream(rng, s, C, 300, {1, 2, 3}));
  return make_windows(streams, small_profile(C, L), 5);
}

}  // namespace

TEST_CASE("profiles") {
  const auto pamap = DatasetProfile::pamap2({1, 2, 3, 4, 12, 13, 17});
  CHECK(pamap.channels == 27);
  CHECK(pamap.length == 100);
  CHECK(pamap.num_classes() == 7);
  const auto rwhar = DatasetProfile::rwhar();
  CHECK(rwhar.channels == 6);
  CHECK(rwhar.length == 50);
  CHECK(rwhar.num_classes() == 8);
  CHECK(*rwhar.class_index(3) == 2);
  CHECK_FALSE(rwhar.class_index(42).has_value());
  CHECK(DatasetProfile::from_json(pamap.to_json()).channel_names == pamap.channel_names);
  CHECK_THROWS_AS(DatasetProfile::pamap2({1, 2}), DataError);
  CHECK_THROWS_AS(profile_by_name("pamap2"), DataError);
  CHECK_THROWS_AS(profile_by_name("nope"), DataError);
  auto bad = small_profile(2, 4, {1});
  CHECK_THROWS_AS(bad.validate(), DataError);
  bad = small_profile(2, 4);
  bad.channel_names = {"a", "a"};
  CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("canonical csv: two finite rows") {
  auto dir = scratch_dir("csv_two");
  auto path = write_text(dir / "a.csv", "subject,activity,t,ch_0,ch_1\n1,3,0.0,1.5,-2\n1,3,0.02,1.5,-2\n");
  auto streams = load_canonical_csv(path);
  REQUIRE(streams.size() == 1);
  CHECK(streams[0].length() == 2);
  CHECK(streams[0].channels[0] == std::vector<double>{1.5, 1.5});
  CHECK(streams[0].channels[1] == std::vector<double>{-2.0, -2.0});
  CHECK(streams[0].labels == std::vector<int>{3, 3});
  CHECK(streams[0].sample_rate == doctest::Approx(50.0));
}

TEST_CASE("canonical csv: gaps are interpolated") {
  auto dir = scratch_dir("csv_nan");
  auto path = write_text(dir / "a.csv",
                         "subject,activity,t,ch_0,ch_1\n"
                         "1,1,0,1.0,nan\n"
                         "1,1,1,NaN,\n"
                         "1,1,2,3.0,4.0\n"
                         "1,1,3,,inf\n");
  auto s = load_canonical_csv(path).at(0);
  CHECK(s.channels[0][1] == doctest::Approx(2.0));
  CHECK(s.channels[0][3] == 3.0);  // trailing: nearest valid
  CHECK(s.channels[1] == std::vector<double>{4.0, 4.0, 4.0, 4.0});

  std::vector<double> v{NAN, 0.0, NAN, NAN, 3.0, NAN};
  CHECK(interpolate_gaps(v));
  CHECK(v == std::vector<double>{0.0, 0.0, 1.0, 2.0, 3.0, 3.0});
}

TEST_CASE("canonical csv: subjects are split") {
  auto dir = scratch_dir("csv_subjects");
  std::string text = "subject,activity,t,ch_0\n";
  const std::map<int, int> lengths{{4, 7}, {2, 3}, {9, 5}};
  // Interleave the subjects' rows; each stays time-ordered.
  for (int t = 0; t < 7; ++t) {
    for (auto [subject, n] : lengths) {
      if (t < n) text += std::to_string(subject) + ",1," + std::to_string(t) + "," + std::to_string(subject * t) + "\n";
    }
  }
  auto streams = load_canonical_csv(write_text(dir / "a.csv", text));
  REQUIRE(streams.size() == 3);
  for (const auto& s : streams) {
    CHECK(s.length() == static_cast<std::size_t>(lengths.at(s.subject_id)));
    CHECK(s.channels[0].back() == s.subject_id * (lengths.at(s.subject_id) - 1));
  }
  CHECK(streams[0].subject_id == 2);
}

TEST_CASE("canonical csv: errors") {
  auto dir = scratch_dir("csv_errors");
  CHECK_THROWS_AS(load_canonical_csv(write_text(dir / "h.csv", "subj,activity,t,ch_0\n1,1,0,1\n")), DataError);
  CHECK_THROWS_AS(load_canonical_csv(write_text(dir / "h2.csv", "subject,activity,t\n1,1,0\n")), DataError);
  CHECK_THROWS_AS(load_canonical_csv(write_text(dir / "t.csv", "subject,activity,t,ch_0\n1,1,1,1\n1,1,0.5,2\n")),
                  DataError);
  CHECK_THROWS_AS(load_canonical_csv(write_text(dir / "eq.csv", "subject,activity,t,ch_0\n1,1,1,1\n1,1,1,2\n")),
                  DataError);
  CHECK_THROWS_AS(load_canonical_csv(write_text(dir / "n.csv", "subject,activity,t,ch_0,ch_1\n1,1,0,1,nan\n1,1,1,2,\n")),
                  DataError);
  CHECK_THROWS_AS(load_canonical_csv(write_text(dir / "c.csv", "subject,activity,t,ch_0\n1,1,0,1,5\n")), DataError);
  CHECK_THROWS_AS(load_canonical_csv(write_text(dir / "x.csv", "subject,activity,t,ch_0\n1,1,0,abc\n")), DataError);
  CHECK_THROWS_AS(load_canonical_csv(dir / "missing.csv"), DataError);
  CHECK(load_canonical_csv(write_text(dir / "empty.csv", "subject,activity,t,ch_0\n")).empty());
}

TEST_CASE("canonical csv round trip") {
  auto dir = scratch_dir("csv_rt");
  ToyCorpusConfig cfg;
  cfg.segment_length = 50;
  auto streams = make_toy_streams(cfg);
  write_canonical_csv(streams, dir / "toy.csv");
  auto back = load_canonical_csv(dir / "toy.csv");
  REQUIRE(back.size() == streams.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].subject_id == streams[i].subject_id);
    CHECK(back[i].labels == streams[i].labels);
    CHECK(back[i].channels == streams[i].channels);
    CHECK(back[i].sample_rate == doctest::Approx(streams[i].sample_rate));
  }
}

namespace {

// One PAMAP2 row whose column j holds 1000*row + j; the heart-rate column
// (2) is NaN as in most raw rows.
std::string pamap_row(int row, int activity) {
  std::string line;
  for (std::size_t j = 0; j < kPamap2Columns; ++j) {
    if (j) line += ' ';
    if (j == 1) line += std::to_string(activity);
    else if (j == 2) line += "NaN";
    else line += std::to_string(1000 * row + static_cast<int>(j));
  }
  return line + "\n";
}

}  // namespace

TEST_CASE("pamap2 adapter") {
  auto dir = scratch_dir("pamap2");
  std::string text;
  const std::vector<int> activities{0, 1, 1, 0, 4, 24, 4};
  for (std::size_t r = 0; r < activities.size(); ++r) text += pamap_row(static_cast<int>(r), activities[r]);
  write_text(dir / "subject105.dat", text);
  write_text(dir / "subject102.dat", pamap_row(0, 0) + pamap_row(1, 0));
  write_text(dir / "readme.txt", "ignored");

  auto streams = load_pamap2(dir, {1, 2, 3, 4, 12, 13, 17});
  REQUIRE(streams.size() == 2);
  CHECK(streams[0].subject_id == 102);
  CHECK(streams[0].length() == 0);  // only transient samples
  const auto& s = streams[1];
  CHECK(s.subject_id == 105);
  CHECK(s.labels == std::vector<int>{1, 1, 4, 4});
  REQUIRE(s.channels.size() == 27);
  // Hand, chest, ankle: acc16, gyro, mag.
  const std::vector<int> expected_columns{4,  5,  6,  10, 11, 12, 13, 14, 15, 21, 22, 23, 27, 28,
                                          29, 30, 31, 32, 38, 39, 40, 44, 45, 46, 47, 48, 49};
  const std::vector<int> kept_rows{1, 2, 4, 6};
  for (std::size_t c = 0; c < 27; ++c) {
    for (std::size_t t = 0; t < kept_rows.size(); ++t) {
      CHECK(s.channels[c][t] == 1000.0 * kept_rows[t] + expected_columns[c]);
    }
  }
  CHECK(s.channel_names[0] == "hand_acc_x");
  CHECK(s.channel_names[26] == "ankle_mag_z");
  s.validate();

  write_text(dir / "subject107.dat", "1 2 3\n");
  CHECK_THROWS_AS(load_pamap2(dir, {1}), DataError);
  CHECK_THROWS_AS(load_pamap2(dir / "absent", {1}), DataError);
  CHECK_THROWS_AS(load_pamap2(scratch_dir("pamap2_empty"), {1}), DataError);
}

TEST_CASE("make_windows counts") {
  const auto p = small_profile(2, 100);
  CHECK(make_windows(ramp_stream(1, 100, 2, 1), p, 50).size() == 1);
  CHECK(make_windows(ramp_stream(1, 150, 2, 1), p, 50).size() == 2);
  CHECK(make_windows(ramp_stream(1, 99, 2, 1), p, 50).size() == 0);
  CHECK(make_windows(ramp_stream(1, 300, 2, 9), p, 50).size() == 0);  // activity outside profile
  CHECK(default_stride(p) == 50);

  auto ds = make_windows(ramp_stream(7, 150, 2, 2), p, 50);
  CHECK(ds.windows[1].subject_id == 7);
  CHECK(ds.windows[1].label == 2);
  CHECK(ds.windows[1].data.shape() == Shape{2, 100});
  CHECK(ds.windows[1].data[0] == 50.0);
  CHECK(ds.windows[1].data[100] == 1050.0);

  CHECK_THROWS_AS(make_windows(ramp_stream(1, 150, 3, 1), p, 50), ShapeError);
  CHECK_THROWS_AS(make_windows(ramp_stream(1, 150, 2, 1), p, 0), DataError);
}

TEST_CASE("make_windows drops mixed-label windows") {
  auto s = ramp_stream(1, 60, 1, 1);
  for (std::size_t t = 25; t < 60; ++t) s.labels[t] = 2;
  const auto p = small_profile(1, 10);
  auto ds = make_windows(s, p, 5);
  const auto ref = oracle::enumerate_windows(s.labels, 10, 5, p.activity_ids);
  REQUIRE(ds.size() == ref.size());
  CHECK(ds.size() == 10);  // starts 0..50 step 5, minus the one at 20
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(ds.windows[i].label == ref[i].label);
    CHECK(ds.windows[i].data[0] == static_cast<double>(ref[i].start));
  }
}

TEST_CASE("make_windows matches brute force on random streams") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t L = 1 + rng.below(40), stride = 1 + rng.below(30);
    auto s = oracle::random_stream(rng, trial, 2, 400, {1, 2, 3, 4});
    const auto p = small_profile(2, L);
    const auto ds = make_windows(s, p, stride);
    const auto ref = oracle::enumerate_windows(s.labels, L, stride, p.activity_ids);
    REQUIRE(ds.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(ds.windows[i].label == ref[i].label);
      CHECK(ds.windows[i].data[L - 1] == s.channels[0][ref[i].start + L - 1]);
    }
  }
}

TEST_CASE("normalization") {
  const auto p = small_profile(2, 4);
  RecordStream s = ramp_stream(1, 40, 2, 1);
  for (auto& v : s.channels[1]) v = 3.0 * v + 1e4;
  auto train = make_windows(s, p, 2);
  const auto stats = fit_normalize(train);
  auto z = apply_normalize(train, stats);
  const auto zs = fit_normalize(z);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(std::abs(zs.mean[c]) < 1e-12);
    CHECK(zs.stddev[c] == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Held-out data is scaled with the training statistics.
  RecordStream other = ramp_stream(2, 20, 2, 1);
  auto held = make_windows(other, p, 2);
  auto zh = apply_normalize(held, stats);
  CHECK(zh.windows[0].data[1] == doctest::Approx((held.windows[0].data[1] - stats.mean[0]) / stats.stddev[0]));
  const auto own = fit_normalize(held);
  CHECK(own.mean[0] != doctest::Approx(stats.mean[0]));

  const auto back = denormalize(z, stats);
  for (std::size_t i = 0; i < train.size(); ++i) {
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(back.windows[i].data[k] - train.windows[i].data[k]) <= 1e-10);
  }
  const Tensor batch_back = denormalize(z.all(), stats);
  CHECK(batch_back[9] == doctest::Approx(train.all()[9]));

  // Constant shift only: mean becomes 0.
  RecordStream shifted = ramp_stream(1, 40, 2, 1);
  for (auto& ch : shifted.channels) for (auto& v : ch) v += 123.0;
  auto zshift = apply_normalize(make_windows(shifted, p, 2), fit_normalize(make_windows(shifted, p, 2)));
  CHECK(std::abs(fit_normalize(zshift).mean[0]) < 1e-12);

  RecordStream flat = ramp_stream(1, 40, 2, 1);
  flat.channels[1].assign(40, 5.0);
  CHECK_THROWS_AS(fit_normalize(make_windows(flat, p, 2)), DataError);
  CHECK_THROWS_AS(fit_normalize(WindowedDataset{p, {}}), DataError);
}

TEST_CASE("normalization never reads validation windows") {
  auto ds = random_dataset(5);
  auto [train, val] = loso_split(ds, 2);
  const auto stats = fit_normalize(train);
  // Recompute from the training windows alone.
  std::vector<double> sum(2, 0.0);
  std::size_t n = 0;
  for (const auto& w : train.windows) {
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t t = 0; t < 10; ++t) sum[c] += w.data[c * 10 + t];
    }
    n += 10;
  }
  for (std::size_t c = 0; c < 2; ++c) CHECK(stats.mean[c] == doctest::Approx(sum[c] / static_cast<double>(n)));
}

TEST_CASE("loso split") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto ds = random_dataset(seed);
    if (ds.empty()) continue;
    for (int subject : ds.subjects()) {
      auto [train, val] = loso_split(ds, subject);
      for (const auto& w : val.windows) CHECK(w.subject_id == subject);
      for (const auto& w : train.windows) CHECK(w.subject_id != subject);
      CHECK(train.size() + val.size() == ds.size());
      auto all = oracle::tally(ds), merged = oracle::tally(train);
      for (auto [k, v] : oracle::tally(val)) merged[k] += v;
      CHECK(merged == all);
      std::size_t brute = 0;
      for (const auto& w : ds.windows) brute += w.subject_id == subject;
      CHECK(val.size() == brute);
    }
  }
  auto ds = random_dataset(3);
  CHECK_THROWS_AS(loso_split(ds, 99), DataError);
}

TEST_CASE("partition by class") {
  auto single = make_windows(ramp_stream(1, 100, 2, 3), small_profile(2, 10), 10);
  auto buckets = partition_by_class(single);
  REQUIRE(buckets.size() == 1);
  CHECK(buckets.begin()->first == 3);
  CHECK(buckets.begin()->second.size() == 10);

  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    auto ds = random_dataset(seed);
    auto parts = partition_by_class(ds);
    std::size_t total = 0;
    for (const auto& [label, bucket] : parts) {
      total += bucket.size();
      std::vector<const SensorWindow*> filtered;
      for (const auto& w : ds.windows) if (w.label == label) filtered.push_back(&w);
      REQUIRE(filtered.size() == bucket.size());
      for (std::size_t i = 0; i < filtered.size(); ++i) {
        CHECK(bucket.windows[i].label == label);
        CHECK(bucket.windows[i].data.impl_ptr() == filtered[i]->data.impl_ptr());
      }
    }
    CHECK(total == ds.size());
  }
}

TEST_CASE("class indices follow the profile order") {
  auto ds = make_windows(ramp_stream(1, 20, 2, 3), small_profile(2, 10, {3, 1}), 10);
  CHECK(class_indices(ds) == std::vector<std::size_t>{0, 0});
  ds.windows[0].label = 7;
  CHECK_THROWS_AS(class_indices(ds), DataError);
}

TEST_CASE("window persistence round trip") {
  auto dir = scratch_dir("io");
  auto ds = random_dataset(11, 3, 7);
  REQUIRE(ds.size() > 5);
  NormStats stats{{0.1, -0.2, 1.0 / 3.0}, {1.5, 2.0, std::sqrt(2.0)}};
  auto manifest = save_windowed(ds, dir / "set", stats);
  CHECK(std::filesystem::exists(manifest));
  auto loaded = load_windowed(dir / "set");
  REQUIRE(loaded.dataset.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(loaded.dataset.windows[i].label == ds.windows[i].label);
    CHECK(loaded.dataset.windows[i].subject_id == ds.windows[i].subject_id);
    const auto a = ds.windows[i].data.data(), b = loaded.dataset.windows[i].data.data();
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  }
  REQUIRE(loaded.stats.has_value());
  CHECK(loaded.stats->mean == stats.mean);
  CHECK(loaded.stats->stddev == stats.stddev);
  CHECK(loaded.dataset.profile.channel_names == ds.profile.channel_names);

  // Overwrite with a smaller set: stale shards disappear.
  WindowedDataset small{ds.profile, {ds.windows[0]}};
  save_windowed(small, dir / "set");
  CHECK(load_windowed(manifest).dataset.size() == 1);
  CHECK_FALSE(load_windowed(manifest).stats.has_value());
  CHECK_FALSE(std::filesystem::exists(dir / "set" / "windows_1.bin"));

  WindowedDataset empty{ds.profile, {}};
  save_windowed(empty, dir / "empty");
  CHECK(load_windowed(dir / "empty").dataset.size() == 0);

  auto text = io::read_file(manifest);
  text.replace(text.find("\"version\": 1"), 12, "\"version\": 9");
  io::write_file_atomic(manifest, text);
  CHECK_THROWS_AS(load_windowed(manifest), DataError);

  save_windowed(ds, dir / "trunc");
  std::filesystem::resize_file(dir / "trunc" / "windows_0.bin", 16);
  CHECK_THROWS_AS(load_windowed(dir / "trunc"), DataError);
  CHECK_THROWS_AS(load_windowed(dir / "nothing"), DataError);
}

TEST_CASE("toy corpus") {
  ToyCorpusConfig cfg;
  auto streams = make_toy_streams(cfg);
  REQUIRE(streams.size() == 3);
  const auto p = DatasetProfile::toy();
  auto ds = make_windows(streams, p, default_stride(p));
  // Per bout of 200 samples: 7 windows at stride 25; boundary windows drop.
  CHECK(ds.size() == 3 * 4 * 7);
  auto parts = partition_by_class(ds);
  CHECK(parts.at(0).size() == parts.at(1).size());
  CHECK(ds.subjects() == std::vector<int>{1, 2, 3});
  // Same seed, same corpus.
  auto again = make_toy_streams(cfg);
  CHECK(again[2].channels[5] == streams[2].channels[5]);
  // Square windows only take values near the two levels.
  const auto& sq = parts.at(1).windows[0].data;
  for (std::size_t t = 0; t < 50; ++t) CHECK(std::abs(std::abs(sq[t]) - 1.0) < 0.2 + 5 * cfg.noise);
}
