"""cmapforge: построение и проверка перцептивно равномерных цветовых карт."""

__version__ = "0.1.0"
