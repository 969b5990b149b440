"""AMSGRAD optimizer (canonical form, no bias correction)."""

import numpy as np


class Amsgrad:
    """Minimizes via m/v moment tracking with a running maximum of v.

    Update: m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2;
    vhat <- max(vhat, v);  theta <- theta - lr * m / (sqrt(vhat) + eps).
    """

    def __init__(self, n_params, lr=1e-3, beta1=0.7, beta2=0.99, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self.vhat = np.zeros(n_params)
        self.t = 0

    def step(self, params, grads):
        grads = np.asarray(grads, dtype=np.float64)
        if not np.all(np.isfinite(grads)):
            raise FloatingPointError("non-finite gradient")
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grads
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grads**2
        np.maximum(self.vhat, self.v, out=self.vhat)
        return params - self.lr * self.m / (np.sqrt(self.vhat) + self.eps)
