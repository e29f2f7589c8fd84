#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedsched/rng.hpp"

namespace fedsched {

// One user's labeled samples. Features are stored row-major.
struct ClientDataset {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> features;  // rows * cols
    std::vector<double> labels;    // rows

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(features).subspan(i * cols, cols);
    }
    std::size_t size() const { return rows; }
    void push_row(std::span<const double> x, double y);
    void validate() const;  // throws std::invalid_argument on broken invariants
};

enum class PartitionScheme { Iid, LabelSorted };

struct Partition {
    std::vector<ClientDataset> clients;
    PartitionScheme scheme = PartitionScheme::Iid;
    std::uint64_t seed = 0;

    std::size_t client_count() const { return clients.size(); }
    std::size_t total_size() const;
    std::vector<std::size_t> sizes() const;
};

// Two-class Gaussian blobs with labels +/-1. Classes are centered at
// +/- separation/2 along the first coordinate and interleaved by index. A
// constant bias coordinate is appended as the last feature (cols = dim + 1),
// so linear models can place the boundary off the origin and class imbalance
// shows up in per-client gradients.
ClientDataset make_blobs(std::size_t n_samples, std::size_t dim, double separation,
                         std::uint64_t seed);

// Assigns every sample of `data` to one of `n_clients` users.
//   Iid:         seeded shuffle, then near-equal contiguous chunks.
//   LabelSorted: stable sort by label, then near-equal contiguous shards, so
//                each client sees as few distinct labels as possible.
// Requires 1 <= n_clients <= data.rows; every client receives >= 1 sample.
Partition partition_data(const ClientDataset& data, std::size_t n_clients,
                         PartitionScheme scheme, std::uint64_t seed);

// Concatenates clients in ascending index order.
ClientDataset pool(const Partition& p);

// Seeded split into (train, holdout). holdout_fraction in [0, 1).
std::pair<ClientDataset, ClientDataset> split_holdout(const ClientDataset& data,
                                                      double holdout_fraction,
                                                      std::uint64_t seed);

// IDX-format loader (big-endian magic 0x00000803 for images, 0x00000801 for
// labels). Pixels are scaled to [0,1]; labels kept as raw digit values.
// subset = 0 loads everything, otherwise the first `subset` samples.
ClientDataset load_idx(const std::string& images_path, const std::string& labels_path,
                       std::size_t subset);

// Binary even/odd digit task: even -> +1, odd -> -1.
void map_labels_even_odd(ClientDataset& data);

}  // namespace fedsched
