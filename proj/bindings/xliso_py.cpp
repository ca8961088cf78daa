#include <pybind11/pybind11.h>
PYBIND11_MODULE(xliso, m) { m.doc() = "placeholder"; }
