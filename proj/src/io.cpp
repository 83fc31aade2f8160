namespace rhl {}
