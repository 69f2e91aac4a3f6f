# Enable package imports for submodules under tests.test_python
