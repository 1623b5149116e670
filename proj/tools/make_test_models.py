"""Writes the two tiny ONNX models used by the backend tests.

classifier: 1x3x224x224 -> 1x2 softmax of [0, 20 * (0.5 - mean(x))].
segmenter:  1x3x224x224 -> scores 1x2 = [0.9, 0.3],
            masks 1x2x224x224 = [1 - red, red].
"""
import sys
from pathlib import Path

import torch


class TinyClassifier(torch.nn.Module):
    def __init__(self):
        super().__init__()
        self.pool = torch.nn.AdaptiveAvgPool2d(1)
        self.fc = torch.nn.Linear(3, 2)
        with torch.no_grad():
            self.fc.weight.copy_(torch.tensor([[0.0, 0.0, 0.0], [-20.0 / 3, -20.0 / 3, -20.0 / 3]]))
            self.fc.bias.copy_(torch.tensor([0.0, 10.0]))

    def forward(self, x):
        return torch.softmax(self.fc(torch.flatten(self.pool(x), 1)), dim=1)


class TinySegmenter(torch.nn.Module):
    def __init__(self):
        super().__init__()
        self.pool = torch.nn.AdaptiveAvgPool2d(1)
        self.head = torch.nn.Linear(3, 2)
        self.conv = torch.nn.Conv2d(3, 2, kernel_size=1)
        with torch.no_grad():
            self.head.weight.zero_()
            self.head.bias.copy_(torch.tensor([0.9, 0.3]))
            self.conv.weight.copy_(torch.tensor([[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]).view(2, 3, 1, 1))
            self.conv.bias.copy_(torch.tensor([1.0, 0.0]))

    def forward(self, x):
        return self.head(torch.flatten(self.pool(x), 1)), self.conv(x)


def main(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(0)
    x = torch.rand(1, 3, 224, 224)
    torch.onnx.export(TinyClassifier(), x, out_dir / "tiny_classifier.onnx",
                      input_names=["input"], output_names=["probs"], opset_version=11, dynamo=False)
    torch.onnx.export(TinySegmenter(), x, out_dir / "tiny_segmenter.onnx",
                      input_names=["input"], output_names=["scores", "masks"], opset_version=11, dynamo=False)


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "tests" / "data")
