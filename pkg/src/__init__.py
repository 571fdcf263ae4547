"""
gesturebench - gesture recognition from hand landmarks vs raw video volumes.

- Synthetic hand-gesture data (landmark sequences and paired frame volumes)
- Landmark LSTM and 3D CNN classifiers on a small numpy autodiff core
- Training, evaluation and a side-by-side efficiency benchmark
- Real-time frame-by-frame translation of gestures to text
"""

__version__ = "0.1.0"
