#include "nvcpt/master_equation.hpp"

namespace nvcpt {

template struct LindbladSystem<3>;
template struct LindbladSystem<9>;

}  // namespace nvcpt
