#include "mtcnn/tensor.hpp"

#include <sstream>

namespace mtcnn {

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << "x";
    os << s[i];
  }
  os << "]";
  return os.str();
}

std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

template class Tensor<float>;
template class Tensor<double>;
template class Graph<float>;
template class Graph<double>;

}  // namespace mtcnn
