#pragma once

namespace fedsched {

// Training schedule: tau local steps between aggregations, K aggregations,
// T = K * tau total local steps.
struct Schedule {
    long long tau = 1;
    long long K = 1;

    long long T() const { return tau * K; }
    bool valid() const { return tau >= 1 && K >= 1; }
};

}  // namespace fedsched
