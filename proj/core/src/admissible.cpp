namespace reconkit {}
