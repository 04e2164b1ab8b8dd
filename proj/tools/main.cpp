#include "app.hpp"

int main(int argc, char** argv) {
    return wsv::app::main_entry(argc, argv);
}
