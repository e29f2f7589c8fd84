#include "fedsched/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace fedsched {

void ClientDataset::push_row(std::span<const double> x, double y) {
    if (rows == 0 && cols == 0) cols = x.size();
    if (x.size() != cols) throw std::invalid_argument("push_row: feature width mismatch");
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(y);
    ++rows;
}

void ClientDataset::validate() const {
    if (rows < 1) throw std::invalid_argument("dataset must hold at least one sample");
    if (features.size() != rows * cols || labels.size() != rows)
        throw std::invalid_argument("dataset shape mismatch");
    for (double v : features)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    for (double v : labels)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite label value");
}

std::size_t Partition::total_size() const {
    std::size_t n = 0;
    for (const auto& c : clients) n += c.rows;
    return n;
}

std::vector<std::size_t> Partition::sizes() const {
    std::vector<std::size_t> s;
    s.reserve(clients.size());
    for (const auto& c : clients) s.push_back(c.rows);
    return s;
}

ClientDataset make_blobs(std::size_t n_samples, std::size_t dim, double separation,
                         std::uint64_t seed) {
    if (n_samples < 1 || dim < 1) throw std::invalid_argument("make_blobs: empty shape");
    Rng rng(seed);
    ClientDataset d;
    d.cols = dim + 1;
    d.rows = n_samples;
    d.features.resize(n_samples * d.cols);
    d.labels.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double label = (i % 2 == 0) ? 1.0 : -1.0;
        d.labels[i] = label;
        for (std::size_t j = 0; j < dim; ++j) {
            double center = (j == 0) ? label * separation / 2.0 : 0.0;
            d.features[i * d.cols + j] = rng.normal(center, 1.0);
        }
        d.features[i * d.cols + dim] = 1.0;
    }
    return d;
}

namespace {

ClientDataset take_rows(const ClientDataset& data, std::span<const std::size_t> idx) {
    ClientDataset out;
    out.cols = data.cols;
    out.rows = idx.size();
    out.features.reserve(idx.size() * data.cols);
    out.labels.reserve(idx.size());
    for (std::size_t i : idx) {
        auto r = data.row(i);
        out.features.insert(out.features.end(), r.begin(), r.end());
        out.labels.push_back(data.labels[i]);
    }
    return out;
}

}  // namespace

Partition partition_data(const ClientDataset& data, std::size_t n_clients,
                         PartitionScheme scheme, std::uint64_t seed) {
    data.validate();
    if (n_clients < 1) throw std::invalid_argument("partition: need at least one client");
    if (n_clients > data.rows)
        throw std::invalid_argument("partition: more clients than samples");

    std::vector<std::size_t> order(data.rows);
    std::iota(order.begin(), order.end(), std::size_t{0});

    if (scheme == PartitionScheme::Iid) {
        Rng rng(seed);
        rng.shuffle(order);
    } else {
        // Stable sort keeps the original index as tiebreaker: deterministic.
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return data.labels[a] < data.labels[b];
        });
    }

    Partition p;
    p.scheme = scheme;
    p.seed = seed;
    p.clients.reserve(n_clients);
    const std::size_t base = data.rows / n_clients;
    const std::size_t extra = data.rows % n_clients;
    std::size_t pos = 0;
    for (std::size_t c = 0; c < n_clients; ++c) {
        const std::size_t count = base + (c < extra ? 1 : 0);
        p.clients.push_back(
            take_rows(data, std::span<const std::size_t>(order).subspan(pos, count)));
        pos += count;
    }
    return p;
}

ClientDataset pool(const Partition& p) {
    if (p.clients.empty()) throw std::invalid_argument("pool: empty partition");
    ClientDataset out;
    out.cols = p.clients.front().cols;
    for (const auto& c : p.clients) {
        if (c.cols != out.cols) throw std::invalid_argument("pool: feature width mismatch");
        out.features.insert(out.features.end(), c.features.begin(), c.features.end());
        out.labels.insert(out.labels.end(), c.labels.begin(), c.labels.end());
        out.rows += c.rows;
    }
    return out;
}

std::pair<ClientDataset, ClientDataset> split_holdout(const ClientDataset& data,
                                                      double holdout_fraction,
                                                      std::uint64_t seed) {
    data.validate();
    if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
        throw std::invalid_argument("split_holdout: fraction must be in [0,1)");
    std::vector<std::size_t> order(data.rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    std::size_t n_hold = static_cast<std::size_t>(std::floor(holdout_fraction * data.rows));
    if (n_hold >= data.rows) n_hold = data.rows - 1;
    const std::size_t n_train = data.rows - n_hold;
    auto span = std::span<const std::size_t>(order);
    ClientDataset train = take_rows(data, span.subspan(0, n_train));
    ClientDataset hold =
        n_hold > 0 ? take_rows(data, span.subspan(n_train, n_hold)) : ClientDataset{};
    return {std::move(train), std::move(hold)};
}

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("idx read failed: " + path);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

ClientDataset load_idx(const std::string& images_path, const std::string& labels_path,
                       std::size_t subset) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("cannot open idx image file: " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("cannot open idx label file: " + labels_path);

    if (read_be32(img, images_path) != 0x00000803u)
        throw std::runtime_error("bad idx image magic: " + images_path);
    const std::uint32_t n_img = read_be32(img, images_path);
    const std::uint32_t h = read_be32(img, images_path);
    const std::uint32_t w = read_be32(img, images_path);

    if (read_be32(lab, labels_path) != 0x00000801u)
        throw std::runtime_error("bad idx label magic: " + labels_path);
    const std::uint32_t n_lab = read_be32(lab, labels_path);
    if (n_img != n_lab) throw std::runtime_error("idx image/label count mismatch");

    std::size_t n = n_img;
    if (subset > 0 && subset < n) n = subset;
    const std::size_t dim = std::size_t(h) * std::size_t(w);

    ClientDataset d;
    d.rows = n;
    d.cols = dim;
    d.features.resize(n * dim);
    d.labels.resize(n);

    std::vector<unsigned char> buf(dim);
    for (std::size_t i = 0; i < n; ++i) {
        if (!img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim)))
            throw std::runtime_error("idx image truncated: " + images_path);
        for (std::size_t j = 0; j < dim; ++j)
            d.features[i * dim + j] = static_cast<double>(buf[j]) / 255.0;
        char c;
        if (!lab.read(&c, 1)) throw std::runtime_error("idx labels truncated: " + labels_path);
        d.labels[i] = static_cast<double>(static_cast<unsigned char>(c));
    }
    d.validate();
    return d;
}

void map_labels_even_odd(ClientDataset& data) {
    for (double& y : data.labels) {
        const long digit = std::lround(y);
        y = (digit % 2 == 0) ? 1.0 : -1.0;
    }
}

}  // namespace fedsched
