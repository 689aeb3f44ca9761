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

#include "chanpred/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "chanpred/error.hpp"

namespace chanpred {

using nlohmann::json;

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw IoError("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

namespace {

std::string join_row(std::initializer_list<std::string> cells)
{
    std::string row;
    for (const auto& c : cells) {
        if (!row.empty()) row += ',';
        row += c;
    }
    row += '\n';
    return row;
}

ChannelSeries from_triples(const std::vector<double>& t, std::vector<cplx> samples)
{
    if (t.empty()) throw IoError("channel file has no samples");
    ChannelSeries ch;
    ch.t0 = t.front();
    ch.samples = std::move(samples);
    if (t.size() == 1) {
        ch.sample_rate_hz = 1.0;
        return ch;
    }
    const double span = t.back() - t.front();
    if (!(span > 0.0)) throw IoError("channel time column must increase");
    double rate = static_cast<double>(t.size() - 1) / span;
    if (std::abs(rate - std::round(rate)) < 1e-6 * rate) rate = std::round(rate);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double expect = ch.t0 + static_cast<double>(i) / rate;
        if (std::abs(t[i] - expect) > 1e-6 / rate) throw IoError("channel time column is not uniformly sampled");
    }
    ch.sample_rate_hz = rate;
    ch.validate();
    return ch;
}

double parse_real(std::string_view s, std::size_t line)
{
    std::string buf(s);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size())
        throw IoError("line " + std::to_string(line) + ": '" + buf + "' is not a number");
    return v;
}

void append_le(std::string& out, double v)
{
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char raw[8];
    std::memcpy(raw, &bits, 8);
    out.append(raw, 8);
}

double read_le(const char* p)
{
    std::uint64_t bits = 0;
    std::memcpy(&bits, p, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    return std::bit_cast<double>(bits);
}

}  // namespace

std::string channel_to_csv(const ChannelSeries& ch)
{
    std::string out = "t,re,im\n";
    for (std::size_t i = 0; i < ch.size(); ++i)
        out += join_row({format_real(ch.time(i)), format_real(ch.samples[i].real()), format_real(ch.samples[i].imag())});
    return out;
}

std::string channel_to_binary(const ChannelSeries& ch)
{
    std::string out;
    out.reserve(24 * ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i) {
        append_le(out, ch.time(i));
        append_le(out, ch.samples[i].real());
        append_le(out, ch.samples[i].imag());
    }
    return out;
}

ChannelSeries channel_from_csv(std::string_view text)
{
    std::vector<double> t;
    std::vector<cplx> s;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line != "t,re,im") throw IoError("line 1: expected header 't,re,im'");
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
            throw IoError("line " + std::to_string(line_no) + ": expected three columns");
        t.push_back(parse_real(line.substr(0, c1), line_no));
        s.emplace_back(parse_real(line.substr(c1 + 1, c2 - c1 - 1), line_no), parse_real(line.substr(c2 + 1), line_no));
    }
    return from_triples(t, std::move(s));
}

ChannelSeries channel_from_binary(std::string_view bytes)
{
    if (bytes.size() % 24 != 0) throw IoError("binary channel size is not a multiple of 24 bytes");
    const std::size_t n = bytes.size() / 24;
    std::vector<double> t(n);
    std::vector<cplx> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const char* p = bytes.data() + 24 * i;
        t[i] = read_le(p);
        s[i] = cplx(read_le(p + 8), read_le(p + 16));
    }
    return from_triples(t, std::move(s));
}

ChannelSeries read_channel(const std::filesystem::path& path)
{
    const std::string data = read_file(path);
    return path.extension() == ".bin" ? channel_from_binary(data) : channel_from_csv(data);
}

std::string tracks_to_csv(const SlidingEstimate& est)
{
    std::vector<std::tuple<std::size_t, int, const TrackPoint*>> rows;
    for (const auto& tr : est.tracks)
        for (const auto& p : tr.points) rows.emplace_back(p.frame, tr.id, &p);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    std::string out = "frame,track_id,a,f,phi,re,im\n";
    for (const auto& [frame, id, p] : rows)
        out += join_row({std::to_string(frame), std::to_string(id), format_real(p->params.amplitude),
                         format_real(p->params.doppler_hz), format_real(p->params.phase), format_real(p->value.real()),
                         format_real(p->value.imag())});
    return out;
}

std::string sparsity_to_csv(std::span<const SparsityReport> trace)
{
    std::string out = "frame,ratio,delta\n";
    for (const auto& r : trace) out += join_row({std::to_string(r.frame), format_real(r.ratio), format_real(r.delta)});
    return out;
}

std::string prediction_to_csv(std::span<const PredictionRow> rows)
{
    std::string out = "t,re,im,track_id\n";
    for (const auto& r : rows)
        out += join_row({format_real(r.t), format_real(r.value.real()), format_real(r.value.imag()), std::to_string(r.track_id)});
    return out;
}

std::string ber_to_csv(std::span<const BerResult> rows)
{
    std::string out = "method,ebn0_db,errors,bits,ber\n";
    for (const auto& r : rows)
        out += join_row({r.method, format_real(r.ebn0_db), std::to_string(r.bit_errors), std::to_string(r.total_bits),
                         format_real(r.ber)});
    return out;
}

namespace {

json layer_json(const LayerWeights& w, int layer)
{
    json amp = json::array(), ph = json::array();
    for (const auto& e : w.entries()) {
        amp.push_back(e.amplitude);
        ph.push_back(e.phase);
    }
    return {{"layer", layer}, {"rows", w.rows()}, {"cols", w.cols()}, {"amplitude", amp}, {"phase", ph}};
}

LayerWeights layer_from(const json& j)
{
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const auto amp = j.at("amplitude").get<std::vector<double>>();
    const auto ph = j.at("phase").get<std::vector<double>>();
    if (amp.size() != rows * cols || ph.size() != rows * cols) throw ShapeError("weights JSON: array length != rows * cols");
    std::vector<PolarComplex> e(amp.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (!(amp[i] >= 0.0) || !std::isfinite(ph[i])) throw IoError("weights JSON: invalid amplitude or phase");
        e[i] = {amp[i], ph[i]};
    }
    return LayerWeights(rows, cols, std::move(e));
}

json weights_json(const LayerWeights& w1, const LayerWeights& w2)
{
    return {{"layers", json::array({layer_json(w1, 1), layer_json(w2, 2)})}};
}

std::pair<LayerWeights, LayerWeights> weights_from(const json& j)
{
    const auto& layers = j.at("layers");
    if (!layers.is_array() || layers.size() != 2) throw IoError("weights JSON: expected two layers");
    if (layers[0].at("layer").get<int>() != 1 || layers[1].at("layer").get<int>() != 2)
        throw IoError("weights JSON: layers must be numbered 1 and 2");
    return {layer_from(layers[0]), layer_from(layers[1])};
}

template <class F>
auto guarded(F&& f)
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw IoError(std::string("JSON: ") + e.what());
    }
}

}  // namespace

std::string weights_to_json(const LayerWeights& w1, const LayerWeights& w2) { return weights_json(w1, w2).dump(1) + "\n"; }

std::pair<LayerWeights, LayerWeights> weights_from_json(std::string_view text)
{
    return guarded([&] { return weights_from(json::parse(text)); });
}

std::string snapshot_to_json(const std::map<int, TrackPredictor>& tracks)
{
    json arr = json::array();
    for (const auto& [id, tp] : tracks) {
        json hist = json::array();
        for (const cplx v : tp.history()) hist.push_back({v.real(), v.imag()});
        arr.push_back({{"track_id", id},
                       {"scale", tp.scale()},
                       {"trained", tp.trained()},
                       {"history", hist},
                       {"weights", weights_json(tp.hidden_weights(), tp.output_weights())}});
    }
    return json{{"tracks", arr}}.dump(1) + "\n";
}

std::map<int, TrackPredictor> snapshot_from_json(std::string_view text, const PredictorConfig& cfg)
{
    return guarded([&] {
        const json j = json::parse(text);
        std::map<int, TrackPredictor> out;
        for (const auto& t : j.at("tracks")) {
            const int id = t.at("track_id").get<int>();
            std::deque<cplx> hist;
            for (const auto& v : t.at("history")) hist.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
            auto [w1, w2] = weights_from(t.at("weights"));
            TrackPredictor tp(cfg, mix_seed(0, static_cast<std::uint64_t>(id)));
            tp.restore(std::move(w1), std::move(w2), std::move(hist), t.at("scale").get<double>(), t.at("trained").get<bool>());
            out.emplace(id, std::move(tp));
        }
        return out;
    });
}

}  // namespace chanpred
