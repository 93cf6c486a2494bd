#pragma once
// Gaussian kernel evaluation and kernelized-input construction.

#include <cstddef>
#include <span>
#include <vector>

namespace kaf {

using InputVector = std::vector<double>;
using InputView = std::span<const double>;

struct KernelParams {
    double xi = 1.0;  // bandwidth, > 0

    explicit KernelParams(double bandwidth);
    double inv_two_xi_sq() const { return 1.0 / (2.0 * xi * xi); }
};

// exp(-|a-b|^2 / (2 xi^2)). Throws std::invalid_argument on dimension mismatch.
double gaussian_kernel(InputView a, InputView b, const KernelParams& p);

// Dictionary centers stored dimension-major so the kernel vector is a
// contiguous loop over centers for each input coordinate.
class Dictionary {
public:
    explicit Dictionary(std::size_t dim);
    Dictionary(std::size_t dim, std::span<const InputVector> centers);

    std::size_t dim() const { return cols_.size(); }
    std::size_t size() const { return cols_.empty() ? 0 : cols_.front().size(); }
    bool empty() const { return size() == 0; }

    void append(InputView u);
    void erase(std::size_t index);
    void clear();

    InputVector center(std::size_t index) const;
    std::vector<InputVector> centers() const;
    std::span<const double> coordinate(std::size_t d) const { return cols_[d]; }

    // out.size() must equal size().
    void kernel_vector(InputView u, const KernelParams& p, std::span<double> out) const;
    std::vector<double> kernel_vector(InputView u, const KernelParams& p) const;

private:
    std::vector<std::vector<double>> cols_;
};

// m-th entry is gaussian_kernel(u, centers[m], p); empty for an empty list.
std::vector<double> kernel_vector(InputView u, std::span<const InputVector> centers,
                                  const KernelParams& p);

}  // namespace kaf
