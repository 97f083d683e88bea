"""Free material optimization of 2D conductivity tensors with thermal Hall components."""
