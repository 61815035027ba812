#pragma once

#include <exception>
#include <mutex>

namespace mu3 {

/// Worker threads for grid loops: OpenMP's maximum, capped by the
/// MU3_THREADS environment variable when it is set to a positive integer.
int thread_count();

/// Carries the first exception thrown inside an OpenMP region out of it.
class ExceptionCollector {
 public:
  template <class F>
  void run(F&& body) noexcept {
    try {
      body();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!first_) first_ = std::current_exception();
    }
  }

  void rethrow() const {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr first_;
};

}  // namespace mu3
