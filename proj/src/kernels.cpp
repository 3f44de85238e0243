#include "ecoevo/kernels.hpp"

#include <cmath>

namespace ecoevo {

void InteractionKernel::eval_many(const double* xs, const double*, const double*,
                                  std::size_t n, double z, const double*,
                                  double* to_z, double* from_z) const {
    for (std::size_t g = 0; g < n; ++g) {
        to_z[g] = (*this)(xs[g] - z);
        from_z[g] = (*this)(z - xs[g]);
    }
}

namespace {

class ConstantKernel final : public InteractionKernel {
public:
    explicit ConstantKernel(double v) : v_(v) {}
    double operator()(double) const override { return v_; }
    double bound() const override { return v_; }
    void eval_many(const double*, const double*, const double*, std::size_t n, double,
                   const double*, double* to_z, double* from_z) const override {
        for (std::size_t g = 0; g < n; ++g) {
            to_z[g] = v_;
            from_z[g] = v_;
        }
    }
    std::string describe() const override { return "constant(" + std::to_string(v_) + ")"; }

private:
    double v_;
};

class SigmoidKernel final : public InteractionKernel {
public:
    SigmoidKernel(double a, double c, double lambda) : a_(a), c_(c), lambda_(lambda) {}

    double operator()(double h) const override {
        return a_ * (1.0 - 1.0 / (1.0 + c_ * std::exp(-lambda_ * h)));
    }
    double bound() const override { return a_; }

    // aux0 = exp(-lambda x), aux1 = exp(lambda x); then
    //   k(x - z) = a (1 - 1 / (1 + c aux0 e^{lambda z}))
    //   k(z - x) = a (1 - 1 / (1 + c aux1 e^{-lambda z}))
    int aux_count() const override { return 2; }
    void prepare_aux(double x, double* aux) const override {
        aux[0] = std::exp(-lambda_ * x);
        aux[1] = std::exp(lambda_ * x);
    }
    void eval_many(const double*, const double* aux0, const double* aux1, std::size_t n,
                   double z, const double* zaux, double* to_z, double* from_z) const override {
        const double ez = c_ * zaux[1];   // c e^{lambda z}
        const double emz = c_ * zaux[0];  // c e^{-lambda z}
        for (std::size_t g = 0; g < n; ++g) {
            const double t = ez * aux0[g];
            const double s = emz * aux1[g];
            to_z[g] = a_ * (t / (1.0 + t));
            from_z[g] = a_ * (s / (1.0 + s));
        }
    }
    std::string describe() const override {
        return "sigmoid(a=" + std::to_string(a_) + ",c=" + std::to_string(c_) +
               ",lambda=" + std::to_string(lambda_) + ")";
    }

private:
    double a_, c_, lambda_;
};

class GaussianKernelImpl final : public InteractionKernel {
public:
    GaussianKernelImpl(double amp, double s) : amp_(amp), s_(s) {}
    double operator()(double h) const override {
        const double u = h / s_;
        return amp_ * std::exp(-0.5 * u * u);
    }
    double bound() const override { return amp_; }
    std::string describe() const override {
        return "gaussian(amp=" + std::to_string(amp_) + ",s=" + std::to_string(s_) + ")";
    }

private:
    double amp_, s_;
};

class FunctionKernel final : public InteractionKernel {
public:
    FunctionKernel(std::function<double(double)> f, double bound, std::string label)
        : f_(std::move(f)), bound_(bound), label_(std::move(label)) {}
    double operator()(double h) const override { return f_(h); }
    double bound() const override { return bound_; }
    std::string describe() const override { return label_; }

private:
    std::function<double(double)> f_;
    double bound_;
    std::string label_;
};

}  // namespace

KernelPtr constant_kernel(double value) { return std::make_shared<ConstantKernel>(value); }

KernelPtr sigmoid_kernel(double a, double c, double lambda) {
    return std::make_shared<SigmoidKernel>(a, c, lambda);
}

KernelPtr gaussian_kernel(double amp, double s) {
    return std::make_shared<GaussianKernelImpl>(amp, s);
}

KernelPtr function_kernel(std::function<double(double)> f, double bound, std::string label) {
    return std::make_shared<FunctionKernel>(std::move(f), bound, std::move(label));
}

}  // namespace ecoevo
