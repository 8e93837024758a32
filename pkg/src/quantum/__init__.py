"""Physics modules: states, noise, purification, repeater chain, oracle."""
