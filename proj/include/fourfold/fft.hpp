#pragma once

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <new>

#include "fourfold/errors.hpp"

namespace fourfold {

// FFTW plan creation/destruction is not thread safe; executing distinct
// plans is.  Every plan in this project is built under this mutex and owns
// its own aligned buffers, so plan objects may be used from one thread each
// while being created from many.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// In-place real-to-real transform (1d or 2d) on an owned aligned buffer.
// FFTW_ESTIMATE keeps planning deterministic (no timing-dependent choices).
class R2RPlan {
public:
    R2RPlan(int n0, fftw_r2r_kind k0) : size_(n0) {
        allocate();
        std::lock_guard<std::mutex> lk(fftw_planner_mutex());
        plan_ = fftw_plan_r2r_1d(n0, buf_, buf_, k0, FFTW_ESTIMATE);
        ensure_planned();
    }
    R2RPlan(int n0, int n1, fftw_r2r_kind k0, fftw_r2r_kind k1) : size_(static_cast<size_t>(n0) * n1) {
        allocate();
        std::lock_guard<std::mutex> lk(fftw_planner_mutex());
        plan_ = fftw_plan_r2r_2d(n0, n1, buf_, buf_, k0, k1, FFTW_ESTIMATE);
        ensure_planned();
    }
    R2RPlan(const R2RPlan&) = delete;
    R2RPlan& operator=(const R2RPlan&) = delete;
    ~R2RPlan() {
        {
            std::lock_guard<std::mutex> lk(fftw_planner_mutex());
            if (plan_) fftw_destroy_plan(plan_);
        }
        fftw_free(buf_);
    }

    double* data() { return buf_; }
    size_t size() const { return size_; }
    void execute() { fftw_execute(plan_); }

private:
    void allocate() {
        buf_ = static_cast<double*>(fftw_malloc(sizeof(double) * size_));
        if (!buf_) throw std::bad_alloc();
    }
    void ensure_planned() {
        if (!plan_) {
            fftw_free(buf_);
            throw PreconditionError("fftw: r2r plan creation failed");
        }
    }

    size_t size_ = 0;
    double* buf_ = nullptr;
    fftw_plan plan_ = nullptr;
};

// Paired r2c/c2r transforms on owned buffers for real 2d convolution.
// backward() leaves the usual unnormalized result (scale by 1/(n0*n1)).
class RealDft2D {
public:
    RealDft2D(int n0, int n1)
        : n0_(n0), n1_(n1), nc_(static_cast<size_t>(n0) * (n1 / 2 + 1)) {
        real_ = static_cast<double*>(fftw_malloc(sizeof(double) * static_cast<size_t>(n0) * n1));
        spec_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nc_));
        if (!real_ || !spec_) {
            fftw_free(real_);
            fftw_free(spec_);
            throw std::bad_alloc();
        }
        std::lock_guard<std::mutex> lk(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_r2c_2d(n0, n1, real_, spec_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_2d(n0, n1, spec_, real_, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) {
            if (fwd_) fftw_destroy_plan(fwd_);
            if (bwd_) fftw_destroy_plan(bwd_);
            fftw_free(real_);
            fftw_free(spec_);
            throw PreconditionError("fftw: dft plan creation failed");
        }
    }
    RealDft2D(const RealDft2D&) = delete;
    RealDft2D& operator=(const RealDft2D&) = delete;
    ~RealDft2D() {
        {
            std::lock_guard<std::mutex> lk(fftw_planner_mutex());
            fftw_destroy_plan(fwd_);
            fftw_destroy_plan(bwd_);
        }
        fftw_free(real_);
        fftw_free(spec_);
    }

    int n0() const { return n0_; }
    int n1() const { return n1_; }
    size_t real_size() const { return static_cast<size_t>(n0_) * n1_; }
    size_t spectrum_size() const { return nc_; }
    double* real() { return real_; }
    fftw_complex* spectrum() { return spec_; }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }

private:
    int n0_, n1_;
    size_t nc_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

} // namespace fourfold
