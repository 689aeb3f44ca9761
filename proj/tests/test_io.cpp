// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "chanpred/error.hpp"
#include "chanpred/io.hpp"
#include "test_util.hpp"

using namespace chanpred;

namespace {

ChannelSeries sample_series()
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    ChannelSeries s{{}, 500e3, 0.1234};
    for (int i = 0; i < 37; ++i) s.samples.push_back({g(rng), g(rng)});
    return s;
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "chanpred_test_io";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("format_real round-trips")
{
    for (double v : {0.0, -1.5, 1.0 / 3.0, 6.02214076e23, 5e-324, std::numbers::pi})
        CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
}

TEST_CASE("sha256 known digests")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("channel series round trips")
{
    const auto s = sample_series();
    SUBCASE("csv")
    {
        const auto text = channel_to_csv(s);
        CHECK(text.rfind("t,re,im\n", 0) == 0);
        const auto back = channel_from_csv(text);
        CHECK(back.samples == s.samples);
        CHECK(back.sample_rate_hz == s.sample_rate_hz);
        CHECK(back.t0 == s.t0);
    }
    SUBCASE("binary")
    {
        const auto bytes = channel_to_binary(s);
        CHECK(bytes.size() == s.size() * 24);
        const auto back = channel_from_binary(bytes);
        CHECK(back.samples == s.samples);
        CHECK(back.sample_rate_hz == s.sample_rate_hz);
    }
    SUBCASE("files dispatch on extension")
    {
        write_file(scratch("c.bin"), channel_to_binary(s));
        write_file(scratch("c.csv"), channel_to_csv(s));
        CHECK(read_channel(scratch("c.bin")).samples == s.samples);
        CHECK(read_channel(scratch("c.csv")).samples == s.samples);
        CHECK_THROWS_AS(read_channel(scratch("missing.csv")), IoError);
    }
    SUBCASE("malformed input")
    {
        CHECK_THROWS(channel_from_csv("t,re,im\n0,1,2\n0.1,1\n"));
        CHECK_THROWS(channel_from_csv("t,re,im\n0,1,2\n1,1,2\n3,1,2\n"));
        CHECK_THROWS(channel_from_binary(std::string(23, '\0')));
    }
}

TEST_CASE("table writers")
{
    const std::vector<PredictionRow> rows{{0.5, {1.0, -2.0}, 3}, {0.25, {0.0, 0.5}, -1}};
    CHECK(prediction_to_csv(rows) == "t,re,im,track_id\n0.5,1,-2,3\n0.25,0,0.5,-1\n");
    BerResult r;
    r.method = "ar";
    r.ebn0_db = 4;
    r.bit_errors = 3;
    r.total_bits = 300;
    r.ber = 0.01;
    CHECK(ber_to_csv(std::span(&r, 1)) == "method,ebn0_db,errors,bits,ber\nar,4,3,300,0.01\n");
}

TEST_CASE("weights and snapshot json round trips")
{
    std::mt19937_64 rng(9);
    const auto w1 = testing::random_weights(rng, 4, 3);
    const auto w2 = testing::random_weights(rng, 1, 4);
    const auto [a, b] = weights_from_json(weights_to_json(w1, w2));
    CHECK(a == w1);
    CHECK(b == w2);
    CHECK_THROWS(weights_from_json("{\"layers\": []}"));

    PredictorConfig cfg;
    cfg.shape = {4, 3};
    std::map<int, TrackPredictor> tracks;
    for (int id : {2, 7}) {
        TrackPredictor tp(cfg, static_cast<std::uint64_t>(id));
        for (std::size_t n = 0; n < 12; ++n) tp.online_update(std::polar(0.3, 0.4 * n + id));
        tracks.emplace(id, tp);
    }
    const auto text = snapshot_to_json(tracks);
    const auto back = snapshot_from_json(text, cfg);
    REQUIRE(back.size() == 2);
    for (const auto& [id, tp] : tracks) {
        const auto& r = back.at(id);
        CHECK(r.hidden_weights() == tp.hidden_weights());
        CHECK(r.output_weights() == tp.output_weights());
        CHECK(r.history() == tp.history());
        CHECK(r.scale() == tp.scale());
        CHECK(r.trained() == tp.trained());
        CHECK(r.predict(5) == tp.predict(5));
    }
    CHECK(snapshot_to_json(back) == text);
    PredictorConfig other = cfg;
    other.shape = {5, 3};
    CHECK_THROWS(snapshot_from_json(text, other));
}
